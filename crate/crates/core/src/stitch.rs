//! Layer-by-layer surface construction from stacked closed contours.
//!
//! Each contour is closed by a planar cap, and consecutive contours are
//! joined by a wall: a closed strip of triangles that advances one point
//! at a time along either the sparser or the denser loop. With `i` points
//! on the sparser loop and `j` on the denser one a wall always has exactly
//! `i + j` triangles.
//!
//! Unequal counts are reconciled by a [`StitchPlan`]. The `d = j - i`
//! surplus points of the denser loop are spread over the sparser loop as
//! evenly as possible, so every sparse point fans to either `ceil(j / i)`
//! or `floor(j / i)` dense points. The plan also records `q = j div d` and
//! `r = j mod d` (the spacing of surplus points along the denser loop) and
//! classifies the remainder as zero, one or many.

use nalgebra::Vector3;
use serde::Serialize;
use thiserror::Error;

use crate::delaunay::{constrained_delaunay, DelaunayError};
use crate::geometry::{ContourPolyline, Orientation, Point};
use crate::mesh::{TriangleMesh, Vertex};

/// Vertices closer than this (mm) are merged during assembly.
pub const WELD_TOLERANCE_MM: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StitchError {
    #[error("a layer stack needs at least 2 layers, got {0}")]
    TooFewLayers(usize),
    #[error("layer spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),
    #[error("layer {layer} is degenerate ({points} points)")]
    DegenerateLayer { layer: usize, points: usize },
    #[error("top height {top} must exceed bottom height {bottom}")]
    InvalidHeights { top: f64, bottom: f64 },
    #[error("cap triangulation failed: {0}")]
    Cap(#[from] DelaunayError),
    #[error("contour is not a simple polygon ({kept} cap triangles for {points} points)")]
    NonSimpleContour { points: usize, kept: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Facing {
    Up,
    Down,
}

/// Remainder category of the surplus spacing `j = q * d + r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StitchCase {
    /// `d = 0`: one dense point per sparse point.
    EqualCounts,
    /// `r = 0`.
    FullyDivisible,
    /// `r = 1`.
    RemainderOne,
    /// `r > 1`.
    RemainderMany,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StitchPlan {
    /// Points on the denser loop.
    pub j: usize,
    /// Points on the sparser loop.
    pub i: usize,
    pub d: usize,
    pub q: usize,
    pub r: usize,
    pub case: StitchCase,
    /// True when the loop passed as `top` was the sparser one.
    pub swapped: bool,
    /// Dense points consumed by each sparse point, in loop order.
    pub assignments: Vec<usize>,
}

impl StitchPlan {
    pub fn facet_count(&self) -> usize {
        self.i + self.j
    }
}

/// Plans the wall between two loops from their point counts alone.
pub fn plan_stitch(top: &ContourPolyline, bottom: &ContourPolyline) -> StitchPlan {
    plan_counts(top.len(), bottom.len())
}

pub(crate) fn plan_counts(top: usize, bottom: usize) -> StitchPlan {
    let swapped = top < bottom;
    let (j, i) = if swapped { (bottom, top) } else { (top, bottom) };
    let d = j - i;
    let (q, r) = if d == 0 { (0, 0) } else { (j / d, j % d) };
    let case = match (d, r) {
        (0, _) => StitchCase::EqualCounts,
        (_, 0) => StitchCase::FullyDivisible,
        (_, 1) => StitchCase::RemainderOne,
        _ => StitchCase::RemainderMany,
    };
    // Ceiling accumulation: assignment k covers dense points
    // ceil(k j / i) .. ceil((k + 1) j / i).
    let ceil_div = |a: usize, b: usize| a.div_ceil(b);
    let assignments = (0..i)
        .map(|k| ceil_div((k + 1) * j, i) - ceil_div(k * j, i))
        .collect();
    StitchPlan { j, i, d, q, r, case, swapped, assignments }
}

/// Rotation of `top` that puts its start point nearest to `bottom`'s start.
/// Ties go to the smallest offset.
pub fn align_start(top: &ContourPolyline, bottom: &ContourPolyline) -> usize {
    let anchor = bottom.points()[0];
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, p) in top.points().iter().enumerate() {
        let d = (p - anchor).norm_squared();
        if d < best_d {
            best = k;
            best_d = d;
        }
    }
    best
}

/// Wall triangles between a sparse loop and a dense loop given as vertex
/// indices. The sparse loop is treated as the lower one; callers reverse
/// the winding when it is actually on top.
fn wall_triangles(sparse: &[usize], dense: &[usize], plan: &StitchPlan) -> Vec<[usize; 3]> {
    let (i, j) = (sparse.len(), dense.len());
    let mut out = Vec::with_capacity(i + j);
    let mut s = 0;
    for (k, &take) in plan.assignments.iter().enumerate() {
        for m in 0..take {
            out.push([sparse[k], dense[(s + m + 1) % j], dense[(s + m) % j]]);
        }
        s += take;
        out.push([sparse[k], sparse[(k + 1) % i], dense[s % j]]);
    }
    out
}

fn oriented_wall(top: &[usize], bottom: &[usize]) -> (StitchPlan, Vec<[usize; 3]>) {
    let plan = plan_counts(top.len(), bottom.len());
    if plan.swapped {
        let tris = wall_triangles(top, bottom, &plan)
            .into_iter()
            .map(|[a, b, c]| [a, c, b])
            .collect();
        (plan, tris)
    } else {
        (plan.clone(), wall_triangles(bottom, top, &plan))
    }
}

fn lift(p: &Point, z: f64) -> Vertex {
    Vertex::new(p.x, p.y, z)
}

/// Wall between two counter-clockwise loops whose start points are already
/// aligned. Facets wind so their normals face away from the loop interior.
pub fn build_wall(
    top: &ContourPolyline,
    z_top: f64,
    bottom: &ContourPolyline,
    z_bottom: f64,
) -> Result<TriangleMesh, StitchError> {
    if !(z_top > z_bottom) {
        return Err(StitchError::InvalidHeights { top: z_top, bottom: z_bottom });
    }
    for (layer, c) in [bottom, top].iter().enumerate() {
        if c.len() < 3 {
            return Err(StitchError::DegenerateLayer { layer, points: c.len() });
        }
    }
    let top = top.to_ccw();
    let bottom = bottom.to_ccw();
    let mut mesh = TriangleMesh::new();
    let b_idx: Vec<usize> = bottom.points().iter().map(|p| mesh.add_vertex(lift(p, z_bottom))).collect();
    let t_idx: Vec<usize> = top.points().iter().map(|p| mesh.add_vertex(lift(p, z_top))).collect();
    let (_, tris) = oriented_wall(&t_idx, &b_idx);
    for t in tris {
        mesh.add_triangle(t);
    }
    Ok(mesh)
}

/// Counter-clockwise triangles covering the interior of a simple polygon,
/// indexed into its point list.
fn cap_triangles(c: &ContourPolyline) -> Result<Vec<[usize; 3]>, StitchError> {
    let pts = c.points();
    let n = pts.len();
    let boundary: Vec<(usize, usize)> = (0..n).map(|k| (k, (k + 1) % n)).collect();
    let tris = constrained_delaunay(pts, &boundary)?;
    let kept: Vec<[usize; 3]> = tris
        .into_iter()
        .filter(|t| {
            let [a, b, cc] = t.map(|k| pts[k]);
            let centroid = Point::new((a.x + b.x + cc.x) / 3.0, (a.y + b.y + cc.y) / 3.0);
            c.contains(centroid)
        })
        .collect();
    if kept.len() != n - 2 {
        return Err(StitchError::NonSimpleContour { points: n, kept: kept.len() });
    }
    Ok(kept)
}

/// Planar cap of a contour at height `z`: its Delaunay triangulation with
/// the contour edges enforced, keeping triangles whose centroid is inside.
pub fn cap_layer(c: &ContourPolyline, z: f64, facing: Facing) -> Result<TriangleMesh, StitchError> {
    if c.len() < 3 {
        return Err(StitchError::DegenerateLayer { layer: 0, points: c.len() });
    }
    let c = c.to_ccw();
    let mut mesh = TriangleMesh::new();
    for p in c.points() {
        mesh.add_vertex(lift(p, z));
    }
    for [a, b, cc] in cap_triangles(&c)? {
        match facing {
            Facing::Up => mesh.add_triangle([a, b, cc]),
            Facing::Down => mesh.add_triangle([a, cc, b]),
        }
    }
    Ok(mesh)
}

/// Ordered contours (bottom first) with uniform spacing along z.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    layers: Vec<ContourPolyline>,
    z_spacing_mm: f64,
    base_z_mm: f64,
}

impl LayerStack {
    /// Builds a stack, reorienting every layer counter-clockwise.
    pub fn new(
        layers: Vec<ContourPolyline>,
        z_spacing_mm: f64,
        base_z_mm: f64,
    ) -> Result<Self, StitchError> {
        if layers.len() < 2 {
            return Err(StitchError::TooFewLayers(layers.len()));
        }
        if !(z_spacing_mm > 0.0 && z_spacing_mm.is_finite()) {
            return Err(StitchError::InvalidSpacing(z_spacing_mm));
        }
        for (layer, c) in layers.iter().enumerate() {
            if c.len() < 3 || c.area() == 0.0 {
                return Err(StitchError::DegenerateLayer { layer, points: c.len() });
            }
        }
        let layers = layers
            .into_iter()
            .map(|c| match c.orientation() {
                Orientation::Ccw => c,
                Orientation::Cw => c.reversed(),
            })
            .collect();
        Ok(Self { layers, z_spacing_mm, base_z_mm })
    }

    pub fn layers(&self) -> &[ContourPolyline] {
        &self.layers
    }

    pub fn z_spacing_mm(&self) -> f64 {
        self.z_spacing_mm
    }

    pub fn base_z_mm(&self) -> f64 {
        self.base_z_mm
    }

    pub fn z_of(&self, layer: usize) -> f64 {
        self.base_z_mm + layer as f64 * self.z_spacing_mm
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }
}

/// A closed mesh together with the plan used for every wall layer.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub mesh: TriangleMesh,
    pub wall_plans: Vec<StitchPlan>,
    pub cap_facets: [usize; 2],
}

/// Closed surface: bottom cap facing down, walls between consecutive
/// layers, top cap facing up.
pub fn assemble(stack: &LayerStack) -> Result<TriangleMesh, StitchError> {
    assemble_detailed(stack).map(|a| a.mesh)
}

pub fn assemble_detailed(stack: &LayerStack) -> Result<Assembly, StitchError> {
    let mut aligned: Vec<ContourPolyline> = Vec::with_capacity(stack.len());
    for (k, layer) in stack.layers().iter().enumerate() {
        if k == 0 {
            aligned.push(layer.clone());
        } else {
            let offset = align_start(layer, &aligned[k - 1]);
            aligned.push(layer.rotated(offset));
        }
    }

    let mut mesh = TriangleMesh::new();
    let mut rings: Vec<Vec<usize>> = Vec::with_capacity(aligned.len());
    for (k, layer) in aligned.iter().enumerate() {
        let z = stack.z_of(k);
        rings.push(layer.points().iter().map(|p| mesh.add_vertex(lift(p, z))).collect());
    }

    let bottom = cap_triangles(&aligned[0])?;
    for [a, b, c] in &bottom {
        mesh.add_triangle([rings[0][*a], rings[0][*c], rings[0][*b]]);
    }

    let mut wall_plans = Vec::with_capacity(aligned.len() - 1);
    for k in 1..aligned.len() {
        let (plan, tris) = oriented_wall(&rings[k], &rings[k - 1]);
        for t in tris {
            mesh.add_triangle(t);
        }
        wall_plans.push(plan);
    }

    let last = aligned.len() - 1;
    let top = cap_triangles(&aligned[last])?;
    for [a, b, c] in &top {
        mesh.add_triangle([rings[last][*a], rings[last][*b], rings[last][*c]]);
    }

    Ok(Assembly {
        mesh: mesh.welded(WELD_TOLERANCE_MM),
        wall_plans,
        cap_facets: [bottom.len(), top.len()],
    })
}

/// Direction of a wall facet relative to its loop's centroid axis, used by
/// tests and audits: positive when the normal points away from the axis.
pub fn outward_component(mesh: &TriangleMesh, facet: usize, axis: Point) -> f64 {
    let [a, b, c] = mesh.triangle(facet);
    let centroid = (a.coords + b.coords + c.coords) / 3.0;
    let radial = Vector3::new(centroid.x - axis.x, centroid.y - axis.y, 0.0);
    radial.dot(&mesh.facets()[facet].normal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn regular(n: usize, r: f64, phase: f64) -> ContourPolyline {
        ContourPolyline::new(
            (0..n)
                .map(|k| {
                    let t = phase + 2.0 * PI * k as f64 / n as f64;
                    Point::new(r * t.cos(), r * t.sin())
                })
                .collect(),
        )
        .unwrap()
    }

    fn square(side: f64) -> ContourPolyline {
        ContourPolyline::from_xy(&[(0.0, 0.0), (side, 0.0), (side, side), (0.0, side)]).unwrap()
    }

    #[test]
    fn plan_equal_counts() {
        let p = plan_counts(8, 8);
        assert_eq!((p.j, p.i, p.d), (8, 8, 0));
        assert_eq!(p.case, StitchCase::EqualCounts);
        assert_eq!(p.assignments, vec![1; 8]);
        assert_eq!(p.facet_count(), 16);
    }

    #[test]
    fn plan_fully_divisible() {
        let p = plan_counts(6, 3);
        assert_eq!((p.d, p.q, p.r), (3, 2, 0));
        assert_eq!(p.case, StitchCase::FullyDivisible);
        assert_eq!(p.assignments, vec![2, 2, 2]);
    }

    #[test]
    fn plan_remainders() {
        let p = plan_counts(7, 3);
        assert_eq!((p.d, p.q, p.r), (4, 1, 3));
        assert_eq!(p.case, StitchCase::RemainderMany);
        assert_eq!(p.assignments, vec![3, 2, 2]);

        let p = plan_counts(7, 4);
        assert_eq!((p.d, p.q, p.r), (3, 2, 1));
        assert_eq!(p.case, StitchCase::RemainderOne);
        assert_eq!(p.assignments.iter().sum::<usize>(), 7);

        let p = plan_counts(3, 7);
        assert!(p.swapped);
        assert_eq!((p.j, p.i), (7, 3));
    }

    #[test]
    fn align_recovers_rotation() {
        let base = regular(10, 5.0, 0.1);
        assert_eq!(align_start(&base, &base), 0);
        let top = base.rotated(10 - 3);
        assert_eq!(align_start(&top, &base), 3);
    }

    #[test]
    fn octagon_wall_has_sixteen_outward_facets() {
        let oct = regular(8, 1.0, 0.0);
        let wall = build_wall(&oct, 1.0, &oct, 0.0).unwrap();
        assert_eq!(wall.facet_count(), 16);
        for f in 0..wall.facet_count() {
            assert!(outward_component(&wall, f, Point::origin()) > 0.0);
        }
    }

    #[test]
    fn hexagon_over_triangle() {
        let wall = build_wall(&regular(6, 2.0, 0.0), 1.0, &regular(3, 1.0, 0.0), 0.0).unwrap();
        assert_eq!(wall.facet_count(), 9);
        let audit = wall.audit();
        // Open band: the two loops are the only boundary edges.
        assert_eq!(audit.boundary_edges, 9);
        assert_eq!(audit.nonmanifold_edges, 0);
        assert_eq!(audit.misoriented_edges, 0);
        for f in 0..wall.facet_count() {
            assert!(outward_component(&wall, f, Point::origin()) > 0.0);
        }
        // Swapped roles wind the same way.
        let wall = build_wall(&regular(3, 1.0, 0.0), 1.0, &regular(6, 2.0, 0.0), 0.0).unwrap();
        for f in 0..wall.facet_count() {
            assert!(outward_component(&wall, f, Point::origin()) > 0.0);
        }
    }

    #[test]
    fn wall_rejects_inverted_heights() {
        let sq = square(1.0);
        assert!(matches!(
            build_wall(&sq, 0.0, &sq, 1.0),
            Err(StitchError::InvalidHeights { .. })
        ));
    }

    #[test]
    fn convex_cap_counts_and_normals() {
        let circle = regular(32, 3.0, 0.0);
        let cap = cap_layer(&circle, 2.0, Facing::Up).unwrap();
        assert_eq!(cap.facet_count(), 30);
        let down = cap_layer(&square(1.0), 0.0, Facing::Down).unwrap();
        assert_eq!(down.facet_count(), 2);
        for f in down.facets() {
            assert_eq!(f.normal, Vector3::new(0.0, 0.0, -1.0));
        }
    }

    #[test]
    fn concave_cap_matches_polygon_area() {
        let l = ContourPolyline::from_xy(&[
            (0.0, 0.0),
            (2.0, 0.0),
            (2.0, 1.0),
            (1.0, 1.0),
            (1.0, 2.0),
            (0.0, 2.0),
        ])
        .unwrap();
        let cap = cap_layer(&l, 0.0, Facing::Up).unwrap();
        assert!((cap.surface_area() - l.area()).abs() <= 0.01 * l.area());
    }

    #[test]
    fn prism_from_two_squares() {
        let stack = LayerStack::new(vec![square(1.0), square(1.0)], 1.0, 0.0).unwrap();
        let a = assemble_detailed(&stack).unwrap();
        assert_eq!(a.mesh.facet_count(), 12);
        let audit = a.mesh.audit();
        assert!(audit.is_watertight());
        assert_eq!((audit.vertices, audit.edges), (8, 18));
        assert_eq!(audit.euler_characteristic, 2);
        assert!((audit.signed_volume - 1.0).abs() < 1e-12);
        assert_eq!(a.wall_plans.len(), 1);
    }

    #[test]
    fn stack_validation() {
        assert_eq!(
            LayerStack::new(vec![square(1.0)], 1.0, 0.0),
            Err(StitchError::TooFewLayers(1))
        );
        assert_eq!(
            LayerStack::new(vec![square(1.0), square(1.0)], 0.0, 0.0),
            Err(StitchError::InvalidSpacing(0.0))
        );
        let cw = square(1.0).reversed();
        let s = LayerStack::new(vec![cw.clone(), cw], 1.0, 0.0).unwrap();
        assert!(s.layers().iter().all(|c| c.orientation() == Orientation::Ccw));
    }

    #[test]
    fn mixed_counts_stack_is_closed() {
        let stack = LayerStack::new(
            vec![regular(12, 4.0, 0.0), regular(7, 3.0, 0.3), regular(20, 5.0, 0.1)],
            2.0,
            0.0,
        )
        .unwrap();
        let a = assemble_detailed(&stack).unwrap();
        let audit = a.mesh.audit();
        assert!(audit.is_watertight(), "{audit:?}");
        assert_eq!(audit.genus(), Some(0));
        assert!(audit.signed_volume > 0.0);
        assert_eq!(a.wall_plans.len(), 2);
        assert_eq!(a.wall_plans[0].facet_count(), 19);
        assert_eq!(a.wall_plans[1].facet_count(), 27);
    }
}
