use std::collections::VecDeque;
use std::f64::consts::PI;

use nalgebra::Vector3;
use proptest::prelude::*;

use slice2stl::delaunay::{constrained_delaunay, delaunay_2d};
use slice2stl::geometry::{ContourPolyline, Point};
use slice2stl::mesh::MeshAudit;
use slice2stl::predicates::{incircle, orient2d};
use slice2stl::segment::{label_components, morph, trace_contours, BinaryMask, MorphOp};
use slice2stl::slice::{hu_to_gray, SliceImage};
use slice2stl::smooth::{smooth_sequence, SmoothMethod};
use slice2stl::stitch::{align_start, assemble, build_wall, plan_stitch, LayerStack};

fn polygon(n: usize, radius: f64, phase: f64) -> ContourPolyline {
    ContourPolyline::new(
        (0..n)
            .map(|k| {
                let t = phase + 2.0 * PI * k as f64 / n as f64;
                Point::new(radius * t.cos(), radius * t.sin())
            })
            .collect(),
    )
    .unwrap()
}

fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3..1e3f64, (-20i32..20).prop_map(f64::from)]
}

fn point() -> impl Strategy<Value = Point> {
    (coord(), coord()).prop_map(|(x, y)| Point::new(x, y))
}

fn robust_coord(p: Point) -> robust::Coord<f64> {
    robust::Coord { x: p.x, y: p.y }
}

fn mask(w: usize, h: usize) -> impl Strategy<Value = BinaryMask> {
    proptest::collection::vec(any::<bool>(), w * h).prop_map(move |bits| BinaryMask::new(w, h, bits).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn predicates_agree_with_reference(a in point(), b in point(), c in point(), d in point()) {
        let o = orient2d(a, b, c);
        let r = robust::orient2d(robust_coord(a), robust_coord(b), robust_coord(c));
        prop_assert_eq!(o.partial_cmp(&0.0), r.partial_cmp(&0.0));
        let o = incircle(a, b, c, d);
        let r = robust::incircle(robust_coord(a), robust_coord(b), robust_coord(c), robust_coord(d));
        prop_assert_eq!(o.partial_cmp(&0.0), r.partial_cmp(&0.0));
    }

    #[test]
    fn delaunay_is_empty_circle(pts in proptest::collection::vec(point(), 3..=12)) {
        let Ok(tris) = delaunay_2d(&pts) else { return Ok(()) };
        for t in &tris {
            let [a, b, c] = t.map(|k| pts[k]);
            prop_assert!(orient2d(a, b, c) > 0.0);
            for (k, &p) in pts.iter().enumerate() {
                if !t.contains(&k) {
                    let inside = robust::incircle(robust_coord(a), robust_coord(b), robust_coord(c), robust_coord(p));
                    prop_assert!(inside <= 0.0, "point {} inside circumcircle of {:?}", k, t);
                }
            }
        }
    }

    #[test]
    fn constrained_polygon_edges_present(n in 3usize..40, phase in 0.0..PI, bump in 0.3..0.9f64) {
        // Star-shaped, non-convex when every other vertex is pulled in.
        let pts: Vec<Point> = (0..n)
            .map(|k| {
                let t = phase + 2.0 * PI * k as f64 / n as f64;
                let r = if k % 2 == 1 { bump } else { 1.0 };
                Point::new(r * t.cos(), r * t.sin())
            })
            .collect();
        let edges: Vec<(usize, usize)> = (0..n).map(|k| (k, (k + 1) % n)).collect();
        let tris = constrained_delaunay(&pts, &edges).unwrap();
        for &(u, v) in &edges {
            let found = tris.iter().any(|t| (0..3).any(|e| {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                (a, b) == (u, v) || (a, b) == (v, u)
            }));
            prop_assert!(found, "edge {}-{} missing", u, v);
        }
    }

    #[test]
    fn wall_law(i in 3usize..=200, extra in 0usize..=200, flip in any::<bool>(), phase in 0.0..(2.0 * PI)) {
        let j = (i + extra).min(200);
        let (sparse, dense) = (polygon(i, 4.0, phase), polygon(j, 6.0, 0.0));
        let (top, bottom) = if flip { (sparse, dense) } else { (dense, sparse) };
        let plan = plan_stitch(&top, &bottom);
        prop_assert_eq!(plan.assignments.iter().sum::<usize>(), j);
        let (lo, hi) = (plan.assignments.iter().min().unwrap(), plan.assignments.iter().max().unwrap());
        prop_assert!(hi - lo <= 1);
        prop_assert_eq!(plan.facet_count(), i + j);
        let wall = build_wall(&top, 1.0, &bottom, 0.0).unwrap();
        prop_assert_eq!(wall.facet_count(), i + j);
        let audit = MeshAudit::of(&wall);
        prop_assert_eq!(audit.nonmanifold_edges, 0);
        prop_assert_eq!(audit.misoriented_edges, 0);
        prop_assert_eq!(audit.boundary_edges, i + j);
    }

    #[test]
    fn align_start_matches_exhaustive_search(n in 3usize..30, shift in 0usize..30, phase in 0.0..(2.0 * PI)) {
        let top = polygon(n, 5.0, phase).rotated(shift % n);
        let bottom = polygon(n + 3, 5.0, 0.0);
        let k = align_start(&top, &bottom);
        let d = |m: usize| (top.points()[m] - bottom.points()[0]).norm_squared();
        let best = (0..n).map(d).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(d(k), best);
        prop_assert!((0..k).all(|m| d(m) > best));
    }

    #[test]
    fn stack_translation_equivariance(
        n in 4usize..24, m in 4usize..24, dx in -50.0..50.0f64, dy in -50.0..50.0f64, dz in -10.0..10.0f64,
    ) {
        let layers = vec![polygon(n, 3.0, 0.1), polygon(m, 4.0, 0.2)];
        let base = assemble(&LayerStack::new(layers.clone(), 2.0, 0.0).unwrap()).unwrap();
        let moved: Vec<_> = layers.iter().map(|c| c.translated(dx, dy)).collect();
        let shifted = assemble(&LayerStack::new(moved, 2.0, dz).unwrap()).unwrap();
        // Regular polygons are cocircular, so a cap's diagonals may flip under
        // rounding; compare the quantities that do not depend on that choice.
        prop_assert_eq!(base.facet_count(), shifted.facet_count());
        let moved_base = base.translated(Vector3::new(dx, dy, dz));
        prop_assert!((moved_base.signed_volume() - shifted.signed_volume()).abs() < 1e-6);
        prop_assert!((base.surface_area() - shifted.surface_area()).abs() < 1e-6);
        prop_assert!(MeshAudit::of(&shifted).is_watertight());
    }

    #[test]
    fn open_subset_mask_subset_close(m in mask(16, 16), k in prop_oneof![Just(1usize), Just(3), Just(5)]) {
        let opened = morph(&m, MorphOp::Open, k).unwrap();
        let closed = morph(&m, MorphOp::Close, k).unwrap();
        prop_assert!(opened.is_subset_of(&m));
        prop_assert!(m.is_subset_of(&closed));
        let eroded = morph(&m, MorphOp::Erode, k).unwrap();
        let dilated = morph(&m, MorphOp::Dilate, k).unwrap();
        prop_assert!(eroded.is_subset_of(&opened));
        prop_assert!(closed.is_subset_of(&dilated));
    }

    #[test]
    fn traced_contours_match_flood_fill(m in mask(12, 12)) {
        let (labels, _) = label_components(&m);
        let contours = trace_contours(&m, 3).unwrap();
        // Oracle: 8-connected components by breadth-first search.
        let (w, h) = (m.width(), m.height());
        let mut seen = vec![false; w * h];
        let mut components = Vec::new();
        for start in 0..w * h {
            if !m.bits()[start] || seen[start] {
                continue;
            }
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            let mut members = Vec::new();
            while let Some(p) = queue.pop_front() {
                members.push(p);
                let (x, y) = ((p % w) as isize, (p / w) as isize);
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let (nx, ny) = (x + dx, y + dy);
                        if m.get_signed(nx, ny) {
                            let q = ny as usize * w + nx as usize;
                            if !seen[q] {
                                seen[q] = true;
                                queue.push_back(q);
                            }
                        }
                    }
                }
            }
            components.push(members);
        }
        let oracle_labels: std::collections::HashSet<usize> = labels.iter().copied().filter(|&l| l != usize::MAX).collect();
        prop_assert_eq!(oracle_labels.len(), components.len());
        // Every traced point is foreground and lies on a component boundary.
        for c in &contours {
            prop_assert!(c.signed_area() > 0.0);
            for p in c.points() {
                prop_assert!(m.get(p.x as usize, p.y as usize));
            }
            let first = c.points()[0];
            let id = labels[first.y as usize * w + first.x as usize];
            prop_assert!(c.points().iter().all(|p| labels[p.y as usize * w + p.x as usize] == id));
        }
        // No component is traced twice.
        let traced_ids: Vec<usize> = contours
            .iter()
            .map(|c| labels[c.points()[0].y as usize * w + c.points()[0].x as usize])
            .collect();
        let mut dedup = traced_ids.clone();
        dedup.sort_unstable();
        dedup.dedup();
        prop_assert_eq!(dedup.len(), traced_ids.len());
    }

    #[test]
    fn smoothing_is_translation_equivariant(
        ys in proptest::collection::vec(-100.0..100.0f64, 20..80),
        shift in -1e3..1e3f64,
        span in 0.1..0.5f64,
        cyclic in any::<bool>(),
    ) {
        for method in [SmoothMethod::Loess2, SmoothMethod::MovingAverage] {
            let a = smooth_sequence(&ys, span, method, cyclic).unwrap();
            let moved: Vec<f64> = ys.iter().map(|y| y + shift).collect();
            let b = smooth_sequence(&moved, span, method, cyclic).unwrap();
            for (u, v) in a.values.iter().zip(&b.values) {
                prop_assert!((u + shift - v).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn loess_reproduces_quadratics(
        a in -50.0..50.0f64, b in -5.0..5.0f64, c in -0.5..0.5f64, n in 20usize..100, span in 0.1..0.6f64,
    ) {
        let ys: Vec<f64> = (0..n).map(|k| a + b * k as f64 + c * (k * k) as f64).collect();
        let out = smooth_sequence(&ys, span, SmoothMethod::Loess2, false).unwrap();
        for (s, y) in out.values.iter().zip(&ys) {
            prop_assert!((s - y).abs() <= 1e-9, "{} vs {}", s, y);
        }
    }

    #[test]
    fn hu_window_is_monotone(lo in -2000.0..0.0f64, width in 1.0..5000.0f64) {
        let hus: Vec<f64> = (-3000..4000).step_by(7).map(f64::from).collect();
        let slice = SliceImage::new(hus.len(), 1, 16, hus.clone(), 1.0, 0).unwrap();
        let gray = hu_to_gray(&slice, lo, lo + width).unwrap();
        for w in gray.pixels().windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        prop_assert!(gray.pixels().iter().all(|&g| (0.0..=255.0).contains(&g)));
    }
}
