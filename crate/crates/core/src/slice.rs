//! CT slices in Hounsfield units and slice-directory loading.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::dicom::{parse_dicom, DicomError};
use crate::pgm::{parse_pgm, PgmError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SliceError {
    #[error("image dimensions must be positive, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },
    #[error("expected {expected} pixels, got {actual}")]
    PixelCount { expected: usize, actual: usize },
    #[error("bits stored must lie in [8, 16], got {0}")]
    BitsStored(u8),
    #[error("slice thickness must be positive, got {0}")]
    Thickness(f64),
    #[error("window minimum {min} must be below maximum {max}")]
    InvalidWindow { min: f64, max: f64 },
}

/// One grayscale CT slice; pixel values are Hounsfield units, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceImage {
    width: usize,
    height: usize,
    bits_stored: u8,
    pixels: Vec<f64>,
    slice_thickness_mm: f64,
    slice_index: usize,
}

impl SliceImage {
    pub fn new(
        width: usize,
        height: usize,
        bits_stored: u8,
        pixels: Vec<f64>,
        slice_thickness_mm: f64,
        slice_index: usize,
    ) -> Result<Self, SliceError> {
        if width == 0 || height == 0 {
            return Err(SliceError::EmptyImage { width, height });
        }
        if pixels.len() != width * height {
            return Err(SliceError::PixelCount { expected: width * height, actual: pixels.len() });
        }
        if !(8..=16).contains(&bits_stored) {
            return Err(SliceError::BitsStored(bits_stored));
        }
        if !(slice_thickness_mm > 0.0 && slice_thickness_mm.is_finite()) {
            return Err(SliceError::Thickness(slice_thickness_mm));
        }
        Ok(Self { width, height, bits_stored, pixels, slice_thickness_mm, slice_index })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits_stored(&self) -> u8 {
        self.bits_stored
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn slice_thickness_mm(&self) -> f64 {
        self.slice_thickness_mm
    }

    pub fn slice_index(&self) -> usize {
        self.slice_index
    }

    pub fn with_slice_index(mut self, index: usize) -> Self {
        self.slice_index = index;
        self
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }
}

/// Clamps each pixel to the window and maps it linearly onto [0, 255],
/// rounding half up. The result has 8 bits stored.
pub fn hu_to_gray(slice: &SliceImage, window_min: f64, window_max: f64) -> Result<SliceImage, SliceError> {
    if !(window_min < window_max) {
        return Err(SliceError::InvalidWindow { min: window_min, max: window_max });
    }
    let range = window_max - window_min;
    let pixels = slice
        .pixels
        .iter()
        .map(|&hu| {
            let clamped = hu.clamp(window_min, window_max);
            ((clamped - window_min) / range * 255.0 + 0.5).floor()
        })
        .collect();
    Ok(SliceImage { bits_stored: 8, pixels, ..slice.clone() })
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Dicom { path: PathBuf, source: DicomError },
    #[error("{path}: {source}")]
    Pgm { path: PathBuf, source: PgmError },
    #[error("{path}: unsupported extension")]
    Extension { path: PathBuf },
}

/// `.dcm` and `.pgm` files in `dir`, sorted by file name.
pub fn list_slice_files(dir: &Path) -> Result<Vec<PathBuf>, LoadError> {
    let io = |source| LoadError::Io { path: dir.to_path_buf(), source };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() && slice_kind(&path).is_some() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SliceKind {
    Dicom,
    Pgm,
}

fn slice_kind(path: &Path) -> Option<SliceKind> {
    let ext = path.extension()?.to_str()?.to_ascii_lowercase();
    match ext.as_str() {
        "dcm" => Some(SliceKind::Dicom),
        "pgm" => Some(SliceKind::Pgm),
        _ => None,
    }
}

/// Loads one slice. PGM files carry no thickness, so `default_thickness_mm`
/// is used for them.
pub fn load_slice(path: &Path, default_thickness_mm: f64) -> Result<SliceImage, LoadError> {
    let bytes = std::fs::read(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
    match slice_kind(path) {
        Some(SliceKind::Dicom) => {
            parse_dicom(&bytes).map_err(|source| LoadError::Dicom { path: path.to_path_buf(), source })
        }
        Some(SliceKind::Pgm) => parse_pgm(&bytes, default_thickness_mm)
            .map_err(|source| LoadError::Pgm { path: path.to_path_buf(), source }),
        None => Err(LoadError::Extension { path: path.to_path_buf() }),
    }
}
