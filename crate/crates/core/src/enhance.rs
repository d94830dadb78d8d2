//! Gray-level enhancement: power-law transform, median filter and mean
//! filter, applied in that order.
//!
//! Both filters replicate edge pixels outside the image. Arithmetic stays
//! in `f64`; nothing is quantized between stages.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::slice::SliceImage;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnhanceError {
    #[error("invalid parameter {name} = {value}")]
    InvalidParam { name: &'static str, value: f64 },
    #[error("kernel size {k} must be odd and at most {limit}")]
    InvalidKernel { k: usize, limit: usize },
    #[error("image dimensions must be positive with {expected} pixels, got {actual}")]
    Dimensions { expected: usize, actual: usize },
    #[error("pixel {index} = {value} lies outside [0, 255]")]
    PixelRange { index: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self, EnhanceError> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(EnhanceError::Dimensions { expected: width * height, actual: pixels.len() });
        }
        if let Some((index, &value)) = pixels.iter().enumerate().find(|(_, v)| !(0.0..=255.0).contains(*v)) {
            return Err(EnhanceError::PixelRange { index, value });
        }
        Ok(Self { width, height, pixels })
    }

    /// Wraps a slice that has already been mapped onto [0, 255].
    pub fn from_slice(slice: &SliceImage) -> Result<Self, EnhanceError> {
        Self::new(slice.width(), slice.height(), slice.pixels().to_vec())
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self, EnhanceError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    /// Pixel at signed coordinates, replicating the nearest edge pixel.
    fn clamped(&self, x: isize, y: isize) -> f64 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.pixels[y * self.width + x]
    }

    /// Pixels rounded to integers in [0, 255].
    pub fn quantized(&self) -> Vec<u8> {
        self.pixels.iter().map(|&v| v.round().clamp(0.0, 255.0) as u8).collect()
    }

    fn with_pixels(&self, pixels: Vec<f64>) -> Self {
        Self { width: self.width, height: self.height, pixels }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnhanceParams {
    pub c: f64,
    pub gamma: f64,
    pub median_kernel: usize,
    pub mean_kernel: usize,
}

impl Default for EnhanceParams {
    fn default() -> Self {
        Self { c: 1.0, gamma: 0.3, median_kernel: 9, mean_kernel: 9 }
    }
}

/// `s = 255 * c * (r / 255)^gamma`, clamped to [0, 255].
pub fn power_law(img: &GrayImage, c: f64, gamma: f64) -> Result<GrayImage, EnhanceError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(EnhanceError::InvalidParam { name: "c", value: c });
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(EnhanceError::InvalidParam { name: "gamma", value: gamma });
    }
    Ok(img.with_pixels(
        img.pixels
            .iter()
            .map(|&r| (c * (r / 255.0).powf(gamma) * 255.0).clamp(0.0, 255.0))
            .collect(),
    ))
}

fn check_kernel(img: &GrayImage, k: usize) -> Result<(), EnhanceError> {
    let limit = img.width.min(img.height);
    if k.is_multiple_of(2) || k > limit {
        return Err(EnhanceError::InvalidKernel { k, limit });
    }
    Ok(())
}

pub fn median_filter(img: &GrayImage, k: usize) -> Result<GrayImage, EnhanceError> {
    check_kernel(img, k)?;
    if k == 1 {
        return Ok(img.clone());
    }
    let h = (k / 2) as isize;
    let mut window = Vec::with_capacity(k * k);
    let mut out = Vec::with_capacity(img.pixels.len());
    for y in 0..img.height as isize {
        for x in 0..img.width as isize {
            window.clear();
            for dy in -h..=h {
                for dx in -h..=h {
                    window.push(img.clamped(x + dx, y + dy));
                }
            }
            let mid = window.len() / 2;
            let (_, m, _) = window.select_nth_unstable_by(mid, f64::total_cmp);
            out.push(*m);
        }
    }
    Ok(img.with_pixels(out))
}

/// Box mean, computed as a horizontal pass followed by a vertical pass.
pub fn mean_filter(img: &GrayImage, k: usize) -> Result<GrayImage, EnhanceError> {
    check_kernel(img, k)?;
    if k == 1 {
        return Ok(img.clone());
    }
    let h = (k / 2) as isize;
    let (w, ht) = (img.width as isize, img.height as isize);
    let mut rows = vec![0.0; img.pixels.len()];
    for y in 0..ht {
        for x in 0..w {
            rows[(y * w + x) as usize] = (-h..=h).map(|d| img.clamped(x + d, y)).sum::<f64>();
        }
    }
    let area = (k * k) as f64;
    let mut out = vec![0.0; img.pixels.len()];
    for y in 0..ht {
        for x in 0..w {
            let s: f64 = (-h..=h).map(|d| rows[((y + d).clamp(0, ht - 1) * w + x) as usize]).sum();
            out[(y * w + x) as usize] = (s / area).clamp(0.0, 255.0);
        }
    }
    Ok(img.with_pixels(out))
}

pub fn enhance(img: &GrayImage, p: &EnhanceParams) -> Result<GrayImage, EnhanceError> {
    let s = power_law(img, p.c, p.gamma)?;
    let s = median_filter(&s, p.median_kernel)?;
    mean_filter(&s, p.mean_kernel)
}
