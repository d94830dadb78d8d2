//! Synthetic CT volumes with known geometry: HU 1000 shapes on an HU 0
//! background.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dicom::{write_dicom, DicomEncoding, DicomError};
use crate::pgm::{write_pgm, PgmError};
use crate::slice::{SliceError, SliceImage};

pub const FOREGROUND_HU: f64 = 1000.0;
pub const BACKGROUND_HU: f64 = 0.0;

#[derive(Debug, Error)]
pub enum PhantomError {
    #[error("invalid phantom parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Slice(#[from] SliceError),
    #[error(transparent)]
    Pgm(#[from] PgmError),
    #[error(transparent)]
    Dicom(#[from] DicomError),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Shape dimensions are in pixels; the torus minor axis runs along the
/// slice stack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    Cylinder { radius: f64 },
    Box { side: f64 },
    TorusStack { major_radius: f64, minor_radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub shape: Shape,
    pub width: usize,
    pub height: usize,
    pub slices: usize,
    pub bits_stored: u8,
    pub slice_thickness_mm: f64,
}

impl PhantomSpec {
    /// 512 x 512, 12-bit, 1.5 mm slices.
    pub fn new(shape: Shape, slices: usize) -> Self {
        Self { shape, width: 512, height: 512, slices, bits_stored: 12, slice_thickness_mm: 1.5 }
    }

    fn validate(&self) -> Result<(), PhantomError> {
        let bad = |m: String| Err(PhantomError::InvalidParams(m));
        if self.width == 0 || self.height == 0 || self.slices == 0 {
            return bad(format!("{}x{}x{} volume", self.width, self.height, self.slices));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(PhantomError::InvalidParams(format!("{name} must be positive, got {v}")))
            }
        };
        match self.shape {
            Shape::Cylinder { radius } => positive("radius", radius)?,
            Shape::Box { side } => positive("side", side)?,
            Shape::TorusStack { major_radius, minor_radius } => {
                positive("major_radius", major_radius)?;
                positive("minor_radius", minor_radius)?;
                if minor_radius >= major_radius {
                    return bad("minor_radius must be below major_radius".into());
                }
            }
        }
        if f64::from(1u32 << self.bits_stored.min(16)) <= FOREGROUND_HU {
            return bad(format!("{} bits cannot hold HU {FOREGROUND_HU}", self.bits_stored));
        }
        Ok(())
    }

    /// Height of slice `k` relative to the stack centre, in pixels of
    /// slice spacing.
    fn slice_offset(&self, k: usize) -> f64 {
        k as f64 - (self.slices as f64 - 1.0) / 2.0
    }

    fn inside(&self, x: f64, y: f64, k: usize) -> bool {
        let cx = (self.width as f64 - 1.0) / 2.0;
        let cy = (self.height as f64 - 1.0) / 2.0;
        let (dx, dy) = (x - cx, y - cy);
        match self.shape {
            Shape::Cylinder { radius } => dx * dx + dy * dy <= radius * radius,
            Shape::Box { side } => dx.abs() <= side / 2.0 && dy.abs() <= side / 2.0,
            Shape::TorusStack { major_radius, minor_radius } => {
                // Slices sample the tube at cell centres, so the end slices
                // are never empty.
                let t = self.slice_offset(k) / (self.slices as f64 / 2.0) * minor_radius;
                let half = (minor_radius * minor_radius - t * t).max(0.0).sqrt();
                let rho = (dx * dx + dy * dy).sqrt();
                (rho - major_radius).abs() <= half
            }
        }
    }

    pub fn render_slice(&self, k: usize) -> Result<SliceImage, PhantomError> {
        self.validate()?;
        let pixels = (0..self.height)
            .flat_map(|y| (0..self.width).map(move |x| (x, y)))
            .map(|(x, y)| if self.inside(x as f64, y as f64, k) { FOREGROUND_HU } else { BACKGROUND_HU })
            .collect();
        Ok(SliceImage::new(self.width, self.height, self.bits_stored, pixels, self.slice_thickness_mm, k)?)
    }

    pub fn render(&self) -> Result<Vec<SliceImage>, PhantomError> {
        (0..self.slices).map(|k| self.render_slice(k)).collect()
    }
}

/// Writes `slice_NNNN.pgm` files into `dir`, and DICOM copies into
/// `dir/dicom` when requested. Returns the paths of the primary files.
pub fn write_phantom(spec: &PhantomSpec, dir: &Path, with_dicom: bool) -> Result<Vec<PathBuf>, PhantomError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| PhantomError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let dicom_dir = dir.join("dicom");
    if with_dicom {
        std::fs::create_dir_all(&dicom_dir).map_err(io(&dicom_dir))?;
    }
    let mut written = Vec::with_capacity(spec.slices);
    for k in 0..spec.slices {
        let slice = spec.render_slice(k)?;
        let path = dir.join(format!("slice_{k:04}.pgm"));
        std::fs::write(&path, write_pgm(&slice)?).map_err(io(&path))?;
        if with_dicom {
            let dpath = dicom_dir.join(format!("slice_{k:04}.dcm"));
            std::fs::write(&dpath, write_dicom(&slice, &DicomEncoding::default())?).map_err(io(&dpath))?;
        }
        written.push(path);
    }
    Ok(written)
}
