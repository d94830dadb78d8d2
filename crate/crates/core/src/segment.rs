//! Thresholding, binary morphology and outer-boundary tracing.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ContourPolyline, Point};
use crate::slice::SliceImage;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SegmentError {
    #[error("kernel size {0} must be odd and positive")]
    InvalidKernel(usize),
    #[error("no contours to select from")]
    EmptyInput,
    #[error("min_points must be at least 3, got {0}")]
    MinPoints(usize),
    #[error("mask of {width}x{height} needs {expected} bits, got {actual}")]
    Dimensions { width: usize, height: usize, expected: usize, actual: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, SegmentError> {
        if bits.len() != width * height {
            return Err(SegmentError::Dimensions { width, height, expected: width * height, actual: bits.len() });
        }
        Ok(Self { width, height, bits })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![false; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    /// Out-of-bounds coordinates read as background.
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.bits[y as usize * self.width + x as usize]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Whether every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }
}

/// Foreground is every pixel strictly above `t` HU.
pub fn threshold(slice: &SliceImage, t: f64) -> BinaryMask {
    BinaryMask {
        width: slice.width(),
        height: slice.height(),
        bits: slice.pixels().iter().map(|&v| v > t).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MorphOp {
    Erode,
    Dilate,
    Open,
    Close,
}

impl std::str::FromStr for MorphOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "erode" => Ok(MorphOp::Erode),
            "dilate" => Ok(MorphOp::Dilate),
            "open" => Ok(MorphOp::Open),
            "close" => Ok(MorphOp::Close),
            other => Err(format!("unknown morphology operation {other:?}")),
        }
    }
}

/// One pass of a k-wide line structuring element along x or y.
/// `all` selects erosion, otherwise dilation. Out-of-bounds is background.
fn line_pass(m: &BinaryMask, h: isize, horizontal: bool, all: bool) -> BinaryMask {
    let mut out = BinaryMask::empty(m.width, m.height);
    for y in 0..m.height as isize {
        for x in 0..m.width as isize {
            let mut hits = (-h..=h).map(|d| if horizontal { m.get_signed(x + d, y) } else { m.get_signed(x, y + d) });
            let v = if all { hits.all(|b| b) } else { hits.any(|b| b) };
            out.bits[y as usize * m.width + x as usize] = v;
        }
    }
    out
}

fn erode(m: &BinaryMask, h: isize) -> BinaryMask {
    line_pass(&line_pass(m, h, true, true), h, false, true)
}

fn dilate(m: &BinaryMask, h: isize) -> BinaryMask {
    line_pass(&line_pass(m, h, true, false), h, false, false)
}

fn pad(m: &BinaryMask, h: usize) -> BinaryMask {
    let mut out = BinaryMask::empty(m.width + 2 * h, m.height + 2 * h);
    for y in 0..m.height {
        for x in 0..m.width {
            out.set(x + h, y + h, m.get(x, y));
        }
    }
    out
}

fn crop(m: &BinaryMask, h: usize, width: usize, height: usize) -> BinaryMask {
    let mut out = BinaryMask::empty(width, height);
    for y in 0..height {
        for x in 0..width {
            out.set(x, y, m.get(x + h, y + h));
        }
    }
    out
}

/// Binary morphology with a k x k square. Pixels outside the image are
/// background, so erosion shrinks at the borders. Closing dilates onto a
/// canvas padded by k/2 before eroding, so it never removes a pixel.
pub fn morph(mask: &BinaryMask, op: MorphOp, k: usize) -> Result<BinaryMask, SegmentError> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(SegmentError::InvalidKernel(k));
    }
    let h = k / 2;
    let hi = h as isize;
    Ok(match op {
        MorphOp::Erode => erode(mask, hi),
        MorphOp::Dilate => dilate(mask, hi),
        MorphOp::Open => dilate(&erode(mask, hi), hi),
        MorphOp::Close => crop(&erode(&dilate(&pad(mask, h), hi), hi), h, mask.width, mask.height),
    })
}

/// Applies `(op, k)` steps in order.
pub fn morph_schedule(mask: &BinaryMask, schedule: &[(MorphOp, usize)]) -> Result<BinaryMask, SegmentError> {
    let mut m = mask.clone();
    for &(op, k) in schedule {
        m = morph(&m, op, k)?;
    }
    Ok(m)
}

/// Clockwise neighbour offsets with y pointing down, starting west.
const MOORE: [(isize, isize); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];

fn direction(from: (isize, isize), to: (isize, isize)) -> usize {
    let d = (to.0 - from.0, to.1 - from.1);
    MOORE.iter().position(|&m| m == d).expect("backtrack is a Moore neighbour")
}

/// 8-connected component labels, numbered in raster order of first pixel.
/// Returns the labels and each component's raster-first pixel.
pub fn label_components(mask: &BinaryMask) -> (Vec<usize>, Vec<(usize, usize)>) {
    const NONE: usize = usize::MAX;
    let mut labels = vec![NONE; mask.bits.len()];
    let mut starts = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..mask.bits.len() {
        if !mask.bits[start] || labels[start] != NONE {
            continue;
        }
        let label = starts.len();
        starts.push((start % mask.width, start / mask.width));
        labels[start] = label;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            let (x, y) = ((p % mask.width) as isize, (p / mask.width) as isize);
            for (dx, dy) in MOORE {
                if mask.get_signed(x + dx, y + dy) {
                    let q = (y + dy) as usize * mask.width + (x + dx) as usize;
                    if labels[q] == NONE {
                        labels[q] = label;
                        queue.push_back(q);
                    }
                }
            }
        }
    }
    (labels, starts)
}

/// Moore-neighbour trace of the outer boundary of the component containing
/// `start`, which must be its raster-first pixel. Stops when the start
/// pixel is left by the same move as the first step (Jacob's criterion),
/// so cut vertices at the start may be passed several times.
fn trace_from(mask: &BinaryMask, start: (usize, usize)) -> Vec<(usize, usize)> {
    let s = (start.0 as isize, start.1 as isize);
    let mut boundary = vec![start];
    let (mut c, mut b) = (s, (s.0 - 1, s.1));
    let mut first_move = None;
    let limit = 4 * mask.bits.len() + 8;
    for _ in 0..limit {
        let first = direction(c, b);
        let mut next = None;
        for step in 1..=8 {
            let d = (first + step) % 8;
            let p = (c.0 + MOORE[d].0, c.1 + MOORE[d].1);
            if mask.get_signed(p.0, p.1) {
                let prev = MOORE[(d + 7) % 8];
                next = Some((p, (c.0 + prev.0, c.1 + prev.1)));
                break;
            }
        }
        let Some(mv) = next else {
            // Isolated pixel.
            return boundary;
        };
        if c == s {
            if first_move == Some(mv) {
                boundary.pop();
                return boundary;
            }
            first_move.get_or_insert(mv);
        }
        (c, b) = mv;
        boundary.push((c.0 as usize, c.1 as usize));
    }
    log::warn!("boundary trace from {start:?} hit its step limit");
    boundary
}

/// Outer boundary of every 8-connected foreground component, as pixel
/// centres. Each contour is counter-clockwise, starts at its smallest
/// (y, x) point, and has at least `min_points` points. Contours are
/// ordered by start point.
pub fn trace_contours(mask: &BinaryMask, min_points: usize) -> Result<Vec<ContourPolyline>, SegmentError> {
    if min_points < 3 {
        return Err(SegmentError::MinPoints(min_points));
    }
    let (_, starts) = label_components(mask);
    let mut out = Vec::new();
    for start in starts {
        let pixels = trace_from(mask, start);
        if pixels.len() < min_points {
            continue;
        }
        let pts = pixels.iter().map(|&(x, y)| Point::new(x as f64, y as f64)).collect();
        match ContourPolyline::new(pts) {
            Ok(c) if c.signed_area() != 0.0 => out.push(c.normalized()),
            Ok(_) => log::debug!("dropping zero-area contour at {start:?}"),
            Err(e) => log::debug!("dropping contour at {start:?}: {e}"),
        }
    }
    out.sort_by(|a, b| {
        let (pa, pb) = (a.points()[0], b.points()[0]);
        pa.y.total_cmp(&pb.y).then(pa.x.total_cmp(&pb.x))
    });
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoiPolicy {
    #[default]
    LargestArea,
    All,
}

pub fn select_roi(contours: Vec<ContourPolyline>, policy: RoiPolicy) -> Result<Vec<ContourPolyline>, SegmentError> {
    match policy {
        RoiPolicy::All => Ok(contours),
        RoiPolicy::LargestArea => {
            // First of equal maxima wins.
            let best = contours
                .into_iter()
                .reduce(|best, c| if c.area() > best.area() { c } else { best })
                .ok_or(SegmentError::EmptyInput)?;
            Ok(vec![best])
        }
    }
}
