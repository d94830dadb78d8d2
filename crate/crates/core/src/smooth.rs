//! Contour smoothing by span-parameterised local regression.
//!
//! The x and y coordinate sequences of a contour are smoothed
//! independently as functions of the point index. With `loess2`, each
//! point is replaced by the value at its own index of a quadratic fitted by
//! weighted least squares to the `w` nearest indices, using tricube weights
//! `(1 - (d / d_max)^3)^3` where `d_max` is the largest index distance in
//! the window. `w = round(span * n)`, bumped to the next odd number and
//! clamped to the largest odd value in `[3, n]`.
//!
//! Closed contours use wrap-around windows. Open sequences use windows of
//! the same size shifted inward at the ends, which keeps the fit exact on
//! any sequence that is quadratic in the index.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ContourError, ContourPolyline, Point};

pub const DEFAULT_SPAN: f64 = 0.1;

/// Fewest points a contour must have to be smoothed.
pub const MIN_POINTS: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SmoothError {
    #[error("span must lie in the open interval (0, 1), got {0}")]
    InvalidSpan(f64),
    #[error("smoothing needs at least {MIN_POINTS} points, got {0}")]
    TooFewPoints(usize),
    #[error("window of {window} exceeds {points} points")]
    DegenerateWindow { window: usize, points: usize },
    #[error("contour has zero perimeter")]
    DegenerateContour,
    #[error("resampling needs at least 3 points, got {0}")]
    InvalidTarget(usize),
    #[error("smoothing reversed the contour orientation")]
    OrientationFlipped,
    #[error(transparent)]
    Contour(#[from] ContourError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothMethod {
    MovingAverage,
    #[default]
    Loess2,
}

/// How windows behave at the ends of the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Windows wrap across the closing edge.
    Cyclic,
    /// Windows are shifted inward at the first and last points.
    Open,
    /// Cyclic unless the closing edge is more than twice as long as every
    /// other edge, which marks an open arc stored as a loop.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    span: f64,
    pub method: SmoothMethod,
    pub boundary: Boundary,
}

impl SmoothingParams {
    pub fn new(span: f64, method: SmoothMethod) -> Result<Self, SmoothError> {
        if !(span > 0.0 && span < 1.0) {
            return Err(SmoothError::InvalidSpan(span));
        }
        Ok(Self { span, method, boundary: Boundary::Auto })
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn span(&self) -> f64 {
        self.span
    }
}

impl Default for SmoothingParams {
    fn default() -> Self {
        Self { span: DEFAULT_SPAN, method: SmoothMethod::Loess2, boundary: Boundary::Auto }
    }
}

/// Window length for `n` samples at the given span.
pub fn window_size(n: usize, span: f64) -> usize {
    let mut w = (span * n as f64).round() as usize;
    if w.is_multiple_of(2) {
        w += 1;
    }
    let largest_odd = if n % 2 == 1 { n } else { n.saturating_sub(1) };
    w.clamp(3, largest_odd.max(3))
}

/// Result of smoothing one sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Smoothed {
    pub values: Vec<f64>,
    /// Points whose quadratic fit was rank-deficient and fell back to a
    /// line or a weighted mean.
    pub fallbacks: usize,
}

fn tricube(d: f64) -> f64 {
    let d = d.abs();
    if d >= 1.0 {
        0.0
    } else {
        let t = 1.0 - d * d * d;
        t * t * t
    }
}

/// Index window (as signed offsets from `i`) for point `i`.
fn window_offsets(i: usize, n: usize, w: usize, cyclic: bool) -> Vec<isize> {
    let h = (w / 2) as isize;
    if cyclic {
        (-h..=h).collect()
    } else {
        let start = (i as isize - h).clamp(0, (n - w) as isize);
        (start..start + w as isize).map(|k| k - i as isize).collect()
    }
}

fn at(values: &[f64], i: usize, offset: isize) -> f64 {
    let n = values.len() as isize;
    values[(i as isize + offset).rem_euclid(n) as usize]
}

/// Weighted least-squares fit of degree <= 2 evaluated at offset 0.
/// Returns the estimate and whether the fit degraded below degree 2.
fn local_quadratic(values: &[f64], i: usize, offsets: &[isize]) -> (f64, bool) {
    let d_max = offsets.iter().map(|k| k.unsigned_abs()).max().unwrap_or(1).max(1) as f64;
    let center = values[i];
    let mut s = [0.0f64; 5];
    let mut b = [0.0f64; 3];
    let mut nonzero = 0;
    for &k in offsets {
        let u = k as f64 / d_max;
        let wgt = tricube(u);
        if wgt == 0.0 {
            continue;
        }
        nonzero += 1;
        let y = at(values, i, k) - center;
        let mut up = 1.0;
        for p in s.iter_mut() {
            *p += wgt * up;
            up *= u;
        }
        b[0] += wgt * y;
        b[1] += wgt * y * u;
        b[2] += wgt * y * u * u;
    }
    if nonzero >= 3 {
        let m = Matrix3::new(s[0], s[1], s[2], s[1], s[2], s[3], s[2], s[3], s[4]);
        if let Some(c) = m.lu().solve(&Vector3::new(b[0], b[1], b[2])) {
            return (center + c[0], false);
        }
    }
    if nonzero >= 2 {
        let m = Matrix2::new(s[0], s[1], s[1], s[2]);
        if let Some(c) = m.lu().solve(&Vector2::new(b[0], b[1])) {
            return (center + c[0], true);
        }
    }
    if s[0] > 0.0 {
        (center + b[0] / s[0], true)
    } else {
        (center, true)
    }
}

/// Smooths one coordinate sequence.
pub fn smooth_sequence(
    values: &[f64],
    span: f64,
    method: SmoothMethod,
    cyclic: bool,
) -> Result<Smoothed, SmoothError> {
    if !(span > 0.0 && span < 1.0) {
        return Err(SmoothError::InvalidSpan(span));
    }
    let n = values.len();
    if n < MIN_POINTS {
        return Err(SmoothError::TooFewPoints(n));
    }
    let w = window_size(n, span);
    if w > n {
        return Err(SmoothError::DegenerateWindow { window: w, points: n });
    }
    let mut fallbacks = 0;
    let out = (0..n)
        .map(|i| {
            let offsets = window_offsets(i, n, w, cyclic);
            match method {
                SmoothMethod::MovingAverage => {
                    offsets.iter().map(|&k| at(values, i, k)).sum::<f64>() / offsets.len() as f64
                }
                SmoothMethod::Loess2 => {
                    let (v, degraded) = local_quadratic(values, i, &offsets);
                    fallbacks += degraded as usize;
                    v
                }
            }
        })
        .collect();
    Ok(Smoothed { values: out, fallbacks })
}

/// Whether a contour should be smoothed with wrap-around windows.
pub fn is_cyclic(c: &ContourPolyline, boundary: Boundary) -> bool {
    match boundary {
        Boundary::Cyclic => true,
        Boundary::Open => false,
        Boundary::Auto => {
            let p = c.points();
            let n = p.len();
            let closing = (p[0] - p[n - 1]).norm();
            let longest = p.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
            closing <= 2.0 * longest
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedContour {
    pub contour: ContourPolyline,
    pub fallbacks: usize,
}

/// Smooths x and y independently; the result has the same point count
/// and orientation.
pub fn smooth_contour(
    c: &ContourPolyline,
    params: &SmoothingParams,
) -> Result<SmoothedContour, SmoothError> {
    let n = c.len();
    if n < MIN_POINTS {
        return Err(SmoothError::TooFewPoints(n));
    }
    let cyclic = is_cyclic(c, params.boundary);
    let xs: Vec<f64> = c.points().iter().map(|p| p.x).collect();
    let ys: Vec<f64> = c.points().iter().map(|p| p.y).collect();
    let sx = smooth_sequence(&xs, params.span, params.method, cyclic)?;
    let sy = smooth_sequence(&ys, params.span, params.method, cyclic)?;
    let contour = ContourPolyline::new(
        sx.values
            .iter()
            .zip(&sy.values)
            .map(|(&x, &y)| Point::new(x, y))
            .collect(),
    )?;
    if contour.orientation() != c.orientation() {
        return Err(SmoothError::OrientationFlipped);
    }
    if sx.fallbacks + sy.fallbacks > 0 {
        log::debug!("{} smoothing fits fell back below degree 2", sx.fallbacks + sy.fallbacks);
    }
    Ok(SmoothedContour { contour, fallbacks: sx.fallbacks + sy.fallbacks })
}

/// `n_target` points evenly spaced by arc length around the closed loop,
/// starting at its first point.
pub fn resample_closed(c: &ContourPolyline, n_target: usize) -> Result<ContourPolyline, SmoothError> {
    if n_target < 3 {
        return Err(SmoothError::InvalidTarget(n_target));
    }
    let pts = c.points();
    let n = pts.len();
    let mut cumulative = Vec::with_capacity(n + 1);
    cumulative.push(0.0);
    for k in 0..n {
        let len = (pts[(k + 1) % n] - pts[k]).norm();
        cumulative.push(cumulative[k] + len);
    }
    let perimeter = cumulative[n];
    if !(perimeter > 0.0) {
        return Err(SmoothError::DegenerateContour);
    }
    let mut seg = 0;
    let out = (0..n_target)
        .map(|m| {
            let s = m as f64 * perimeter / n_target as f64;
            while seg + 1 < n && cumulative[seg + 1] <= s {
                seg += 1;
            }
            let len = cumulative[seg + 1] - cumulative[seg];
            let t = if len > 0.0 { (s - cumulative[seg]) / len } else { 0.0 };
            let a = pts[seg];
            let b = pts[(seg + 1) % n];
            a + (b - a) * t
        })
        .collect();
    Ok(ContourPolyline::new(out)?)
}
