//! Binary PGM (P5) slices. Samples are taken verbatim as Hounsfield units.

use thiserror::Error;

use crate::slice::{SliceError, SliceImage};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PgmError {
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("pixel data truncated: expected {expected} bytes, got {actual}")]
    TruncatedPixelData { expected: usize, actual: usize },
    #[error("pixel {index} value {value} cannot be stored with maxval {maxval}")]
    PixelOutOfRange { index: usize, value: f64, maxval: u32 },
    #[error(transparent)]
    Slice(#[from] SliceError),
}

struct Header {
    width: usize,
    height: usize,
    maxval: u32,
    data_start: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header, PgmError> {
    let bad = |msg: &str| PgmError::MalformedHeader(msg.to_string());
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(bad("expected magic P5"));
    }
    let mut pos = 2;
    let mut fields = [0u64; 3];
    for field in fields.iter_mut() {
        // Whitespace and comments before each field.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n' && b != b'\r') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(bad("header ends early")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos || pos - start > 10 {
            return Err(bad("expected a decimal number"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("expected a decimal number"))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(bad("missing whitespace after maxval")),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(bad("zero dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(bad("maxval must lie in [1, 65535]"));
    }
    Ok(Header { width: width as usize, height: height as usize, maxval: maxval as u32, data_start: pos })
}

/// Bits needed to hold `maxval`, clamped to [8, 16].
fn bits_for(maxval: u32) -> u8 {
    (32 - maxval.leading_zeros()).clamp(8, 16) as u8
}

pub fn parse_pgm(bytes: &[u8], slice_thickness_mm: f64) -> Result<SliceImage, PgmError> {
    let h = parse_header(bytes)?;
    let bytes_per_sample = if h.maxval > 255 { 2 } else { 1 };
    let count = h
        .width
        .checked_mul(h.height)
        .ok_or_else(|| PgmError::MalformedHeader("dimensions overflow".into()))?;
    let expected = count.saturating_mul(bytes_per_sample);
    let data = &bytes[h.data_start..];
    if data.len() < expected {
        return Err(PgmError::TruncatedPixelData { expected, actual: data.len() });
    }
    let pixels = if bytes_per_sample == 1 {
        data[..count].iter().map(|&b| f64::from(b)).collect()
    } else {
        data[..expected]
            .chunks_exact(2)
            .map(|c| f64::from(u16::from_be_bytes([c[0], c[1]])))
            .collect()
    };
    Ok(SliceImage::new(h.width, h.height, bits_for(h.maxval), pixels, slice_thickness_mm, 0)?)
}

/// Encodes a slice with `maxval = 2^bits_stored - 1`. Pixels must be
/// integers in `[0, maxval]`.
pub fn write_pgm(slice: &SliceImage) -> Result<Vec<u8>, PgmError> {
    let maxval = (1u32 << slice.bits_stored()) - 1;
    let mut out = format!("P5\n{} {}\n{}\n", slice.width(), slice.height(), maxval).into_bytes();
    for (index, &value) in slice.pixels().iter().enumerate() {
        if !(value >= 0.0 && value <= f64::from(maxval) && value.fract() == 0.0) {
            return Err(PgmError::PixelOutOfRange { index, value, maxval });
        }
        if maxval > 255 {
            out.extend_from_slice(&(value as u16).to_be_bytes());
        } else {
            out.push(value as u8);
        }
    }
    Ok(out)
}
