//! Planar contour primitives shared by segmentation, smoothing and stitching.

use nalgebra::Point2;
use thiserror::Error;

pub type Point = Point2<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContourError {
    #[error("contour needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("consecutive points {0} and {1} coincide")]
    RepeatedPoint(usize, usize),
    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Orientation {
    Ccw,
    Cw,
}

/// Signed shoelace area; positive for counter-clockwise loops.
pub fn shoelace_area(points: &[Point]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    0.5 * twice
}

/// Even-odd point-in-polygon test. Points exactly on an edge may land on
/// either side.
pub fn point_in_polygon(p: Point, poly: &[Point]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let a = poly[i];
        let b = poly[j];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// A closed, ordered loop of 2-D points. The closing edge from the last
/// point back to the first is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPolyline {
    points: Vec<Point>,
}

impl ContourPolyline {
    pub fn new(points: Vec<Point>) -> Result<Self, ContourError> {
        let n = points.len();
        if n < 3 {
            return Err(ContourError::TooFewPoints(n));
        }
        for (i, p) in points.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(ContourError::NonFinite(i));
            }
        }
        for i in 0..n {
            let j = (i + 1) % n;
            if points[i] == points[j] {
                return Err(ContourError::RepeatedPoint(i, j));
            }
        }
        Ok(Self { points })
    }

    pub fn from_xy(coords: &[(f64, f64)]) -> Result<Self, ContourError> {
        Self::new(coords.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn signed_area(&self) -> f64 {
        shoelace_area(&self.points)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn orientation(&self) -> Orientation {
        if self.signed_area() >= 0.0 {
            Orientation::Ccw
        } else {
            Orientation::Cw
        }
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| (self.points[(i + 1) % n] - self.points[i]).norm())
            .sum()
    }

    pub fn centroid(&self) -> Point {
        let n = self.points.len() as f64;
        let (sx, sy) = self
            .points
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Point::new(sx / n, sy / n)
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points }
    }

    pub fn to_ccw(&self) -> Self {
        match self.orientation() {
            Orientation::Ccw => self.clone(),
            Orientation::Cw => self.reversed(),
        }
    }

    /// Cyclic rotation so that index `offset` becomes the first point.
    pub fn rotated(&self, offset: usize) -> Self {
        let mut points = self.points.clone();
        points.rotate_left(offset % self.points.len());
        Self { points }
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| Point::new(p.x + dx, p.y + dy))
                .collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| Point::new(p.x * factor, p.y * factor))
                .collect(),
        }
    }

    /// Index of the lexicographically smallest point, comparing y then x.
    /// Ties resolve to the first occurrence.
    pub fn lexicographic_min_index(&self) -> usize {
        let mut best = 0;
        for (i, p) in self.points.iter().enumerate().skip(1) {
            let b = self.points[best];
            if (p.y, p.x) < (b.y, b.x) {
                best = i;
            }
        }
        best
    }

    /// CCW orientation, starting at the lexicographically smallest point.
    pub fn normalized(&self) -> Self {
        let ccw = self.to_ccw();
        let start = ccw.lexicographic_min_index();
        ccw.rotated(start)
    }

    pub fn contains(&self, p: Point) -> bool {
        point_in_polygon(p, &self.points)
    }
}
