//! Planar Delaunay triangulation.
//!
//! Points are inserted in lexicographic order, each new point being fanned
//! to the hull edges it can see. The resulting triangulation is then made
//! Delaunay by Lawson edge flips. Cocircular quadrilaterals keep the
//! diagonal incident to the lowest input index, which makes the output a
//! pure function of the input order.
//!
//! [`constrained_delaunay`] additionally forces a set of segments into the
//! triangulation by flipping away the edges that cross them, then restores
//! the Delaunay property everywhere except across those segments.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::geometry::Point;
use crate::predicates::{incircle, orient2d};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DelaunayError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("all points are collinear")]
    AllCollinear,
    #[error("points {0} and {1} are identical")]
    DuplicatePoints(usize, usize),
    #[error("constraint {0}-{1} passes through vertex {2}")]
    ConstraintThroughVertex(usize, usize, usize),
    #[error("constraint {0}-{1} crosses constraint {2}-{3}")]
    CrossingConstraints(usize, usize, usize, usize),
    #[error("constraint {0}-{1} could not be recovered")]
    ConstraintNotRecovered(usize, usize),
    #[error("constraint index out of range: {0}")]
    BadConstraint(usize),
}

pub type Triangle = [usize; 3];

/// Delaunay triangulation of `points`, as counter-clockwise index triples.
///
/// Triangles are returned rotated so their smallest index comes first and
/// sorted, so identical input yields identical output.
pub fn delaunay_2d(points: &[Point]) -> Result<Vec<Triangle>, DelaunayError> {
    let mut tri = Builder::sweep(points)?;
    tri.make_delaunay();
    Ok(tri.finish())
}

/// Delaunay triangulation that contains every edge in `constraints`.
pub fn constrained_delaunay(
    points: &[Point],
    constraints: &[(usize, usize)],
) -> Result<Vec<Triangle>, DelaunayError> {
    let mut tri = Builder::sweep(points)?;
    tri.make_delaunay();
    for &(u, v) in constraints {
        if u >= points.len() {
            return Err(DelaunayError::BadConstraint(u));
        }
        if v >= points.len() {
            return Err(DelaunayError::BadConstraint(v));
        }
        tri.insert_constraint(u, v)?;
    }
    tri.make_delaunay();
    Ok(tri.finish())
}

fn undirected(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn third(t: &Triangle, a: usize, b: usize) -> usize {
    t.iter().copied().find(|&v| v != a && v != b).unwrap()
}

/// Strict crossing of the open segments `ab` and `cd`.
fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient2d(a, b, c);
    let o2 = orient2d(a, b, d);
    let o3 = orient2d(c, d, a);
    let o4 = orient2d(c, d, b);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

struct Builder<'a> {
    pts: &'a [Point],
    tris: Vec<Triangle>,
    /// Directed edge -> triangle owning it in CCW order.
    owner: HashMap<(usize, usize), usize>,
    fixed: HashSet<(usize, usize)>,
}

impl<'a> Builder<'a> {
    fn sweep(pts: &'a [Point]) -> Result<Self, DelaunayError> {
        let n = pts.len();
        if n < 3 {
            return Err(DelaunayError::TooFewPoints(n));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            (pts[i].x, pts[i].y)
                .partial_cmp(&(pts[j].x, pts[j].y))
                .expect("finite coordinates")
                .then(i.cmp(&j))
        });
        for w in order.windows(2) {
            if pts[w[0]] == pts[w[1]] {
                let (a, b) = undirected(w[0], w[1]);
                return Err(DelaunayError::DuplicatePoints(a, b));
            }
        }

        let first_off_line = (2..n)
            .find(|&k| orient2d(pts[order[0]], pts[order[1]], pts[order[k]]) != 0.0)
            .ok_or(DelaunayError::AllCollinear)?;

        let mut b = Builder {
            pts,
            tris: Vec::with_capacity(2 * n),
            owner: HashMap::with_capacity(6 * n),
            fixed: HashSet::new(),
        };

        let apex = order[first_off_line];
        let chain = &order[..first_off_line];
        let left = orient2d(pts[chain[0]], pts[chain[1]], pts[apex]) > 0.0;
        for w in chain.windows(2) {
            if left {
                b.push([w[0], w[1], apex]);
            } else {
                b.push([w[1], w[0], apex]);
            }
        }
        let mut hull: Vec<usize> = if left {
            chain.to_vec()
        } else {
            chain.iter().rev().copied().collect()
        };
        hull.push(apex);

        for &p in &order[first_off_line + 1..] {
            hull = b.add_outside_point(hull, p);
        }
        Ok(b)
    }

    /// Fans `p` to every hull edge that sees it and returns the new hull.
    fn add_outside_point(&mut self, hull: Vec<usize>, p: usize) -> Vec<usize> {
        let h = hull.len();
        let visible: Vec<bool> = (0..h)
            .map(|t| orient2d(self.pts[hull[t]], self.pts[hull[(t + 1) % h]], self.pts[p]) < 0.0)
            .collect();
        // Lexicographic insertion order guarantees p is strictly outside the
        // current hull, so at least one edge is visible and they are contiguous.
        let start = (0..h)
            .find(|&t| visible[t] && !visible[(t + h - 1) % h])
            .expect("new point sees the hull");
        let mut end = start;
        while visible[end % h] {
            let a = hull[end % h];
            let b = hull[(end + 1) % h];
            self.push([b, a, p]);
            end += 1;
        }
        // Visible chain runs hull[start] .. hull[end]; interior vertices drop out.
        let mut next = Vec::with_capacity(h + 1);
        let mut t = end % h;
        loop {
            next.push(hull[t]);
            if t == start % h {
                break;
            }
            t = (t + 1) % h;
        }
        next.push(p);
        next
    }

    fn push(&mut self, t: Triangle) {
        let idx = self.tris.len();
        self.tris.push(t);
        self.register(idx);
    }

    fn register(&mut self, idx: usize) {
        let t = self.tris[idx];
        for k in 0..3 {
            self.owner.insert((t[k], t[(k + 1) % 3]), idx);
        }
    }

    fn unregister(&mut self, idx: usize) {
        let t = self.tris[idx];
        for k in 0..3 {
            self.owner.remove(&(t[k], t[(k + 1) % 3]));
        }
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.owner.contains_key(&(a, b)) || self.owner.contains_key(&(b, a))
    }

    /// Flips the diagonal `ab` of the quadrilateral formed by its two
    /// triangles and returns the new diagonal.
    fn flip(&mut self, a: usize, b: usize) -> (usize, usize) {
        let t1 = self.owner[&(a, b)];
        let t2 = self.owner[&(b, a)];
        let c = third(&self.tris[t1], a, b);
        let d = third(&self.tris[t2], a, b);
        self.unregister(t1);
        self.unregister(t2);
        self.tris[t1] = [a, d, c];
        self.tris[t2] = [d, b, c];
        self.register(t1);
        self.register(t2);
        (c, d)
    }

    fn quad(&self, a: usize, b: usize) -> Option<(usize, usize)> {
        let t1 = *self.owner.get(&(a, b))?;
        let t2 = *self.owner.get(&(b, a))?;
        Some((third(&self.tris[t1], a, b), third(&self.tris[t2], a, b)))
    }

    fn should_flip(&self, a: usize, b: usize, c: usize, d: usize) -> bool {
        let s = incircle(self.pts[a], self.pts[b], self.pts[c], self.pts[d]);
        if s > 0.0 {
            return true;
        }
        if s < 0.0 {
            return false;
        }
        // Cocircular: keep the diagonal incident to the lowest index.
        let lowest = a.min(b).min(c).min(d);
        lowest == c || lowest == d
    }

    fn make_delaunay(&mut self) {
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let mut seen = HashSet::new();
        for t in &self.tris {
            for k in 0..3 {
                let e = undirected(t[k], t[(k + 1) % 3]);
                if seen.insert(e) {
                    stack.push(e);
                }
            }
        }
        while let Some((a, b)) = stack.pop() {
            if self.fixed.contains(&(a, b)) {
                continue;
            }
            let (a, b) = if self.owner.contains_key(&(a, b)) { (a, b) } else { (b, a) };
            let Some((c, d)) = self.quad(a, b) else {
                continue;
            };
            if self.should_flip(a, b, c, d) {
                self.flip(a, b);
                for e in [(a, d), (d, b), (b, c), (c, a)] {
                    stack.push(undirected(e.0, e.1));
                }
            }
        }
    }

    fn insert_constraint(&mut self, u: usize, v: usize) -> Result<(), DelaunayError> {
        if u == v {
            return Err(DelaunayError::BadConstraint(u));
        }
        let (pu, pv) = (self.pts[u], self.pts[v]);
        for (w, &pw) in self.pts.iter().enumerate() {
            if w == u || w == v || orient2d(pu, pv, pw) != 0.0 {
                continue;
            }
            let along = (pw - pu).dot(&(pv - pu));
            if along > 0.0 && along < (pv - pu).norm_squared() {
                return Err(DelaunayError::ConstraintThroughVertex(u, v, w));
            }
        }
        if self.has_edge(u, v) {
            self.fixed.insert(undirected(u, v));
            return Ok(());
        }

        let mut sorted: Vec<(usize, usize)> = self
            .owner
            .keys()
            .map(|&(a, b)| undirected(a, b))
            .filter(|&(a, b)| segments_cross(pu, pv, self.pts[a], self.pts[b]))
            .collect();
        // Key order of the map is arbitrary; sort for reproducible flips.
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&(a, b)) = sorted.iter().find(|e| self.fixed.contains(e)) {
            return Err(DelaunayError::CrossingConstraints(u, v, a, b));
        }
        let mut crossing: VecDeque<(usize, usize)> = sorted.into();

        let budget = 16 * self.pts.len() * self.pts.len() + 64;
        let mut steps = 0;
        while let Some((a, b)) = crossing.pop_front() {
            steps += 1;
            if steps > budget {
                return Err(DelaunayError::ConstraintNotRecovered(u, v));
            }
            let (a, b) = if self.owner.contains_key(&(a, b)) { (a, b) } else { (b, a) };
            let Some((c, d)) = self.quad(a, b) else {
                return Err(DelaunayError::ConstraintNotRecovered(u, v));
            };
            let convex = segments_cross(self.pts[a], self.pts[b], self.pts[c], self.pts[d]);
            if !convex {
                crossing.push_back((a, b));
                continue;
            }
            let (c, d) = self.flip(a, b);
            if undirected(c, d) != undirected(u, v)
                && segments_cross(pu, pv, self.pts[c], self.pts[d])
            {
                crossing.push_back(undirected(c, d));
            }
        }
        if !self.has_edge(u, v) {
            return Err(DelaunayError::ConstraintNotRecovered(u, v));
        }
        self.fixed.insert(undirected(u, v));
        Ok(())
    }

    fn finish(self) -> Vec<Triangle> {
        let mut out: Vec<Triangle> = self
            .tris
            .into_iter()
            .map(|t| {
                let k = (0..3).min_by_key(|&k| t[k]).unwrap();
                [t[k], t[(k + 1) % 3], t[(k + 2) % 3]]
            })
            .collect();
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(xy: &[(f64, f64)]) -> Vec<Point> {
        xy.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn single_triangle() {
        let p = pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        assert_eq!(delaunay_2d(&p).unwrap(), vec![[0, 1, 2]]);
        let p = pts(&[(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]);
        assert_eq!(delaunay_2d(&p).unwrap(), vec![[0, 2, 1]]);
    }

    #[test]
    fn unit_square_uses_lowest_index_diagonal() {
        let p = pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let t = delaunay_2d(&p).unwrap();
        assert_eq!(t, vec![[0, 1, 2], [0, 2, 3]]);
        // Same square listed from another corner: diagonal still touches index 0.
        let p = pts(&[(1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)]);
        let t = delaunay_2d(&p).unwrap();
        assert!(t.iter().all(|tri| tri.contains(&0)), "{t:?}");
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn collinear_and_duplicate_inputs() {
        let p = pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]);
        assert_eq!(delaunay_2d(&p), Err(DelaunayError::AllCollinear));
        let p = pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 0.0)]);
        assert_eq!(delaunay_2d(&p), Err(DelaunayError::DuplicatePoints(1, 3)));
        assert_eq!(delaunay_2d(&p[..2]), Err(DelaunayError::TooFewPoints(2)));
    }

    #[test]
    fn collinear_prefix_then_apex() {
        let p = pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (1.5, -2.0)]);
        let t = delaunay_2d(&p).unwrap();
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn constraint_recovery_on_concave_polygon() {
        // A thin notch: the segment 2-3 is not Delaunay on its own.
        let p = pts(&[
            (0.0, 0.0),
            (10.0, 0.0),
            (10.0, 10.0),
            (5.0, 1.0),
            (0.0, 10.0),
        ]);
        let cons: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let t = constrained_delaunay(&p, &cons).unwrap();
        let edges: HashSet<(usize, usize)> = t
            .iter()
            .flat_map(|t| (0..3).map(move |k| undirected(t[k], t[(k + 1) % 3])))
            .collect();
        for &(a, b) in &cons {
            assert!(edges.contains(&undirected(a, b)), "missing {a}-{b}");
        }
    }

    #[test]
    fn constraint_through_vertex_is_rejected() {
        let p = pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (1.0, 1.0)]);
        assert_eq!(
            constrained_delaunay(&p, &[(0, 2)]),
            Err(DelaunayError::ConstraintThroughVertex(0, 2, 1))
        );
    }
}
