//! Reader and writer for a minimal subset of DICOM: single-frame,
//! uncompressed, little-endian CT images.
//!
//! Files may start with the 128-byte preamble and `DICM` magic followed by
//! the explicit-VR file meta group, or directly with an implicit-VR data
//! set. Only the elements needed to rebuild Hounsfield-unit pixels are
//! interpreted; everything else is skipped by its declared length.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::slice::{SliceError, SliceImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tag(pub u16, pub u16);

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:04X},{:04X})", self.0, self.1)
    }
}

pub mod tags {
    use super::Tag;
    pub const TRANSFER_SYNTAX_UID: Tag = Tag(0x0002, 0x0010);
    pub const SLICE_THICKNESS: Tag = Tag(0x0018, 0x0050);
    pub const NUMBER_OF_FRAMES: Tag = Tag(0x0028, 0x0008);
    pub const ROWS: Tag = Tag(0x0028, 0x0010);
    pub const COLUMNS: Tag = Tag(0x0028, 0x0011);
    pub const BITS_ALLOCATED: Tag = Tag(0x0028, 0x0100);
    pub const BITS_STORED: Tag = Tag(0x0028, 0x0101);
    pub const PIXEL_REPRESENTATION: Tag = Tag(0x0028, 0x0103);
    pub const RESCALE_INTERCEPT: Tag = Tag(0x0028, 0x1052);
    pub const RESCALE_SLOPE: Tag = Tag(0x0028, 0x1053);
    pub const PIXEL_DATA: Tag = Tag(0x7FE0, 0x0010);
    pub const ITEM: Tag = Tag(0xFFFE, 0xE000);
    pub const ITEM_DELIMITATION: Tag = Tag(0xFFFE, 0xE00D);
    pub const SEQUENCE_DELIMITATION: Tag = Tag(0xFFFE, 0xE0DD);
}

pub const IMPLICIT_VR_LITTLE_ENDIAN: &str = "1.2.840.10008.1.2";
pub const EXPLICIT_VR_LITTLE_ENDIAN: &str = "1.2.840.10008.1.2.1";
const CT_IMAGE_STORAGE: &str = "1.2.840.10008.5.1.4.1.1.2";

const UNDEFINED_LENGTH: u32 = 0xFFFF_FFFF;
const MAX_NESTING: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DicomError {
    #[error("required tag {0} is missing")]
    MissingTag(Tag),
    #[error("unsupported transfer syntax {0}")]
    UnsupportedTransferSyntax(String),
    #[error("pixel data has {actual} bytes, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("file truncated at byte {0}")]
    TruncatedFile(usize),
    #[error("invalid value for {tag}: {reason}")]
    InvalidValue { tag: Tag, reason: String },
    #[error("sequences nested too deeply at byte {0}")]
    NestingTooDeep(usize),
    #[error(transparent)]
    Slice(#[from] SliceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferSyntax {
    ImplicitVrLittleEndian,
    ExplicitVrLittleEndian,
}

impl TransferSyntax {
    pub fn uid(self) -> &'static str {
        match self {
            TransferSyntax::ImplicitVrLittleEndian => IMPLICIT_VR_LITTLE_ENDIAN,
            TransferSyntax::ExplicitVrLittleEndian => EXPLICIT_VR_LITTLE_ENDIAN,
        }
    }

    fn from_uid(uid: &str) -> Result<Self, DicomError> {
        match uid {
            IMPLICIT_VR_LITTLE_ENDIAN => Ok(TransferSyntax::ImplicitVrLittleEndian),
            EXPLICIT_VR_LITTLE_ENDIAN => Ok(TransferSyntax::ExplicitVrLittleEndian),
            other => Err(DicomError::UnsupportedTransferSyntax(other.to_string())),
        }
    }

    fn explicit(self) -> bool {
        self == TransferSyntax::ExplicitVrLittleEndian
    }
}

/// Geometry and rescale parameters read from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct DicomMeta {
    pub rows: u16,
    pub columns: u16,
    pub bits_allocated: u16,
    pub bits_stored: u16,
    pub pixel_signed: bool,
    pub rescale_slope: f64,
    pub rescale_intercept: f64,
    pub slice_thickness_mm: f64,
    pub transfer_syntax: TransferSyntax,
}

/// VRs whose explicit encoding uses two reserved bytes and a 32-bit length.
fn has_long_length(vr: &[u8; 2]) -> bool {
    matches!(
        vr,
        b"OB" | b"OD" | b"OF" | b"OL" | b"OV" | b"OW" | b"SQ" | b"SV" | b"UC" | b"UR" | b"UT" | b"UN" | b"UV"
    )
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], DicomError> {
        if n > self.remaining() {
            return Err(DicomError::TruncatedFile(self.bytes.len()));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u16(&mut self) -> Result<u16, DicomError> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32, DicomError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn peek_tag(&self) -> Option<Tag> {
        let b = self.bytes.get(self.pos..self.pos + 4)?;
        Some(Tag(u16::from_le_bytes([b[0], b[1]]), u16::from_le_bytes([b[2], b[3]])))
    }

    /// Reads one element header, returning the tag and the value length.
    fn header(&mut self, explicit: bool) -> Result<(Tag, u32), DicomError> {
        let tag = Tag(self.u16()?, self.u16()?);
        if tag.0 == 0xFFFE || !explicit {
            return Ok((tag, self.u32()?));
        }
        let vr = self.take(2)?;
        let vr = [vr[0], vr[1]];
        if has_long_length(&vr) {
            self.take(2)?;
            Ok((tag, self.u32()?))
        } else {
            Ok((tag, u32::from(self.u16()?)))
        }
    }

    /// Skips a sequence of undefined length up to its delimiter.
    fn skip_undefined_sequence(&mut self, explicit: bool, depth: usize) -> Result<(), DicomError> {
        if depth > MAX_NESTING {
            return Err(DicomError::NestingTooDeep(self.pos));
        }
        loop {
            let (tag, len) = self.header(explicit)?;
            match tag {
                tags::SEQUENCE_DELIMITATION => return Ok(()),
                tags::ITEM if len == UNDEFINED_LENGTH => self.skip_undefined_item(explicit, depth + 1)?,
                tags::ITEM => {
                    self.take(len as usize)?;
                }
                other => {
                    return Err(DicomError::InvalidValue {
                        tag: other,
                        reason: "unexpected element inside sequence".into(),
                    })
                }
            }
        }
    }

    fn skip_undefined_item(&mut self, explicit: bool, depth: usize) -> Result<(), DicomError> {
        if depth > MAX_NESTING {
            return Err(DicomError::NestingTooDeep(self.pos));
        }
        loop {
            let (tag, len) = self.header(explicit)?;
            if tag == tags::ITEM_DELIMITATION {
                return Ok(());
            }
            if len == UNDEFINED_LENGTH {
                self.skip_undefined_sequence(explicit, depth + 1)?;
            } else {
                self.take(len as usize)?;
            }
        }
    }
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes)
        .trim_matches(|c: char| c == '\0' || c.is_whitespace())
        .to_string()
}

fn read_us(elements: &HashMap<Tag, &[u8]>, tag: Tag) -> Result<u16, DicomError> {
    let v = elements.get(&tag).ok_or(DicomError::MissingTag(tag))?;
    if v.len() < 2 {
        return Err(DicomError::InvalidValue { tag, reason: format!("{} bytes for US", v.len()) });
    }
    Ok(u16::from_le_bytes([v[0], v[1]]))
}

/// Decimal string; multi-valued strings yield their first value.
fn read_ds(elements: &HashMap<Tag, &[u8]>, tag: Tag) -> Result<f64, DicomError> {
    let v = elements.get(&tag).ok_or(DicomError::MissingTag(tag))?;
    let s = text(v);
    let first = s.split('\\').next().unwrap_or("").trim();
    first
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| DicomError::InvalidValue { tag, reason: format!("not a decimal string: {s:?}") })
}

/// Parses a file and returns both its metadata and the rescaled slice.
pub fn parse_dicom_with_meta(bytes: &[u8]) -> Result<(DicomMeta, SliceImage), DicomError> {
    let mut cur = Cursor { bytes, pos: 0 };
    let syntax = if bytes.len() >= 132 && &bytes[128..132] == b"DICM" {
        cur.pos = 132;
        let mut uid = None;
        while cur.peek_tag().is_some_and(|t| t.0 == 0x0002) {
            let (tag, len) = cur.header(true)?;
            if len == UNDEFINED_LENGTH {
                return Err(DicomError::InvalidValue { tag, reason: "undefined length in file meta".into() });
            }
            let value = cur.take(len as usize)?;
            if tag == tags::TRANSFER_SYNTAX_UID {
                uid = Some(text(value));
            }
        }
        TransferSyntax::from_uid(&uid.ok_or(DicomError::MissingTag(tags::TRANSFER_SYNTAX_UID))?)?
    } else {
        TransferSyntax::ImplicitVrLittleEndian
    };

    let explicit = syntax.explicit();
    let mut elements: HashMap<Tag, &[u8]> = HashMap::new();
    while cur.remaining() > 0 {
        let (tag, len) = cur.header(explicit)?;
        if len == UNDEFINED_LENGTH {
            if tag == tags::PIXEL_DATA {
                return Err(DicomError::UnsupportedTransferSyntax("encapsulated pixel data".into()));
            }
            cur.skip_undefined_sequence(explicit, 0)?;
            continue;
        }
        let value = cur.take(len as usize)?;
        elements.insert(tag, value);
        if tag == tags::PIXEL_DATA {
            break;
        }
    }

    let rows = read_us(&elements, tags::ROWS)?;
    let columns = read_us(&elements, tags::COLUMNS)?;
    let bits_allocated = read_us(&elements, tags::BITS_ALLOCATED)?;
    let bits_stored = read_us(&elements, tags::BITS_STORED)?;
    let pixel_representation = read_us(&elements, tags::PIXEL_REPRESENTATION)?;
    let rescale_intercept = read_ds(&elements, tags::RESCALE_INTERCEPT)?;
    let rescale_slope = read_ds(&elements, tags::RESCALE_SLOPE)?;
    let slice_thickness_mm = read_ds(&elements, tags::SLICE_THICKNESS)?;
    let pixel_data = *elements.get(&tags::PIXEL_DATA).ok_or(DicomError::MissingTag(tags::PIXEL_DATA))?;

    if let Some(frames) = elements.get(&tags::NUMBER_OF_FRAMES) {
        let frames = text(frames);
        if frames.parse::<u32>().map_or(true, |f| f > 1) {
            return Err(DicomError::InvalidValue {
                tag: tags::NUMBER_OF_FRAMES,
                reason: format!("only single-frame images are supported, got {frames:?}"),
            });
        }
    }
    if rows == 0 || columns == 0 {
        return Err(DicomError::InvalidValue { tag: tags::ROWS, reason: format!("{rows}x{columns} image") });
    }
    if bits_allocated != 8 && bits_allocated != 16 {
        return Err(DicomError::InvalidValue {
            tag: tags::BITS_ALLOCATED,
            reason: format!("{bits_allocated} (expected 8 or 16)"),
        });
    }
    if bits_stored < 8 || bits_stored > bits_allocated {
        return Err(DicomError::InvalidValue {
            tag: tags::BITS_STORED,
            reason: format!("{bits_stored} with {bits_allocated} allocated"),
        });
    }
    if pixel_representation > 1 {
        return Err(DicomError::InvalidValue {
            tag: tags::PIXEL_REPRESENTATION,
            reason: pixel_representation.to_string(),
        });
    }
    if rescale_slope == 0.0 {
        return Err(DicomError::InvalidValue { tag: tags::RESCALE_SLOPE, reason: "zero slope".into() });
    }
    if slice_thickness_mm <= 0.0 {
        return Err(DicomError::InvalidValue {
            tag: tags::SLICE_THICKNESS,
            reason: format!("{slice_thickness_mm} mm"),
        });
    }

    let count = rows as usize * columns as usize;
    let bytes_per_sample = bits_allocated as usize / 8;
    let expected = count * bytes_per_sample;
    // Odd-length values carry one byte of padding.
    let padded = expected + (expected % 2);
    if pixel_data.len() != expected && pixel_data.len() != padded {
        return Err(DicomError::LengthMismatch { expected, actual: pixel_data.len() });
    }

    let mask: u32 = (1u32 << bits_stored) - 1;
    let sign_bit: u32 = 1u32 << (bits_stored - 1);
    let signed = pixel_representation == 1;
    let pixels = (0..count)
        .map(|k| {
            let raw = if bytes_per_sample == 1 {
                u32::from(pixel_data[k])
            } else {
                u32::from(u16::from_le_bytes([pixel_data[2 * k], pixel_data[2 * k + 1]]))
            };
            let masked = raw & mask;
            let stored = if signed && masked & sign_bit != 0 {
                masked as i64 - (1i64 << bits_stored)
            } else {
                masked as i64
            };
            stored as f64 * rescale_slope + rescale_intercept
        })
        .collect();

    let meta = DicomMeta {
        rows,
        columns,
        bits_allocated,
        bits_stored,
        pixel_signed: signed,
        rescale_slope,
        rescale_intercept,
        slice_thickness_mm,
        transfer_syntax: syntax,
    };
    let slice = SliceImage::new(
        columns as usize,
        rows as usize,
        bits_stored as u8,
        pixels,
        slice_thickness_mm,
        0,
    )?;
    Ok((meta, slice))
}

/// Parses a CT file into Hounsfield units:
/// `stored_value * rescale_slope + rescale_intercept`, with stored values
/// masked to `bits_stored` first.
pub fn parse_dicom(bytes: &[u8]) -> Result<SliceImage, DicomError> {
    parse_dicom_with_meta(bytes).map(|(_, slice)| slice)
}

/// How Hounsfield units are mapped to stored integers when writing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DicomEncoding {
    pub syntax: TransferSyntax,
    pub rescale_slope: f64,
    pub rescale_intercept: f64,
    /// Write the preamble, magic and file meta group.
    pub with_preamble: bool,
}

impl Default for DicomEncoding {
    fn default() -> Self {
        Self {
            syntax: TransferSyntax::ExplicitVrLittleEndian,
            rescale_slope: 1.0,
            rescale_intercept: -1024.0,
            with_preamble: true,
        }
    }
}

fn pad_even(mut v: Vec<u8>, pad: u8) -> Vec<u8> {
    if v.len() % 2 == 1 {
        v.push(pad);
    }
    v
}

fn put_element(out: &mut Vec<u8>, tag: Tag, vr: &[u8; 2], value: &[u8], explicit: bool) {
    out.extend_from_slice(&tag.0.to_le_bytes());
    out.extend_from_slice(&tag.1.to_le_bytes());
    if explicit {
        out.extend_from_slice(vr);
        if has_long_length(vr) {
            out.extend_from_slice(&[0, 0]);
            out.extend_from_slice(&(value.len() as u32).to_le_bytes());
        } else {
            out.extend_from_slice(&(value.len() as u16).to_le_bytes());
        }
    } else {
        out.extend_from_slice(&(value.len() as u32).to_le_bytes());
    }
    out.extend_from_slice(value);
}

fn ds(v: f64) -> Vec<u8> {
    pad_even(format!("{v}").into_bytes(), b' ')
}

fn ui(v: &str) -> Vec<u8> {
    pad_even(v.as_bytes().to_vec(), 0)
}

/// Encodes a slice as a single-frame 16-bit CT file.
pub fn write_dicom(slice: &SliceImage, enc: &DicomEncoding) -> Result<Vec<u8>, DicomError> {
    let bits = slice.bits_stored();
    if enc.rescale_slope == 0.0 || !enc.rescale_slope.is_finite() {
        return Err(DicomError::InvalidValue { tag: tags::RESCALE_SLOPE, reason: "zero slope".into() });
    }
    let max_stored = (1i64 << bits) - 1;
    let mut pixel_bytes = Vec::with_capacity(slice.pixels().len() * 2);
    for &hu in slice.pixels() {
        let stored = ((hu - enc.rescale_intercept) / enc.rescale_slope).round() as i64;
        if !(0..=max_stored).contains(&stored) {
            return Err(DicomError::InvalidValue {
                tag: tags::PIXEL_DATA,
                reason: format!("{hu} HU does not fit in {bits} unsigned bits"),
            });
        }
        pixel_bytes.extend_from_slice(&(stored as u16).to_le_bytes());
    }
    let rows = u16::try_from(slice.height())
        .map_err(|_| DicomError::InvalidValue { tag: tags::ROWS, reason: "too many rows".into() })?;
    let cols = u16::try_from(slice.width())
        .map_err(|_| DicomError::InvalidValue { tag: tags::COLUMNS, reason: "too many columns".into() })?;

    let mut out = Vec::new();
    if enc.with_preamble {
        out.extend_from_slice(&[0u8; 128]);
        out.extend_from_slice(b"DICM");
        let mut meta = Vec::new();
        put_element(&mut meta, Tag(0x0002, 0x0001), b"OB", &[0, 1], true);
        put_element(&mut meta, Tag(0x0002, 0x0002), b"UI", &ui(CT_IMAGE_STORAGE), true);
        put_element(&mut meta, tags::TRANSFER_SYNTAX_UID, b"UI", &ui(enc.syntax.uid()), true);
        put_element(&mut out, Tag(0x0002, 0x0000), b"UL", &(meta.len() as u32).to_le_bytes(), true);
        out.extend_from_slice(&meta);
    } else if enc.syntax.explicit() {
        return Err(DicomError::UnsupportedTransferSyntax(
            "explicit VR requires the file meta group".into(),
        ));
    }

    let explicit = enc.syntax.explicit();
    let us = |v: u16| v.to_le_bytes();
    put_element(&mut out, Tag(0x0008, 0x0016), b"UI", &ui(CT_IMAGE_STORAGE), explicit);
    put_element(&mut out, Tag(0x0008, 0x0060), b"CS", b"CT", explicit);
    put_element(&mut out, tags::SLICE_THICKNESS, b"DS", &ds(slice.slice_thickness_mm()), explicit);
    put_element(
        &mut out,
        Tag(0x0020, 0x0013),
        b"IS",
        &pad_even((slice.slice_index() + 1).to_string().into_bytes(), b' '),
        explicit,
    );
    put_element(&mut out, Tag(0x0028, 0x0002), b"US", &us(1), explicit);
    put_element(&mut out, Tag(0x0028, 0x0004), b"CS", b"MONOCHROME2 ", explicit);
    put_element(&mut out, tags::ROWS, b"US", &us(rows), explicit);
    put_element(&mut out, tags::COLUMNS, b"US", &us(cols), explicit);
    put_element(&mut out, tags::BITS_ALLOCATED, b"US", &us(16), explicit);
    put_element(&mut out, tags::BITS_STORED, b"US", &us(u16::from(bits)), explicit);
    put_element(&mut out, Tag(0x0028, 0x0102), b"US", &us(u16::from(bits) - 1), explicit);
    put_element(&mut out, tags::PIXEL_REPRESENTATION, b"US", &us(0), explicit);
    put_element(&mut out, tags::RESCALE_INTERCEPT, b"DS", &ds(enc.rescale_intercept), explicit);
    put_element(&mut out, tags::RESCALE_SLOPE, b"DS", &ds(enc.rescale_slope), explicit);
    put_element(&mut out, tags::PIXEL_DATA, b"OW", &pixel_bytes, explicit);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slice(w: usize, h: usize, pixels: Vec<f64>) -> SliceImage {
        SliceImage::new(w, h, 12, pixels, 1.5, 0).unwrap()
    }

    #[test]
    fn table_geometry_round_trip() {
        let s = slice(512, 512, vec![0.0; 512 * 512]);
        for syntax in [TransferSyntax::ExplicitVrLittleEndian, TransferSyntax::ImplicitVrLittleEndian] {
            let enc = DicomEncoding { syntax, ..Default::default() };
            let (meta, back) = parse_dicom_with_meta(&write_dicom(&s, &enc).unwrap()).unwrap();
            assert_eq!((back.width(), back.height(), back.bits_stored()), (512, 512, 12));
            assert_eq!(back.slice_thickness_mm(), 1.5);
            assert_eq!(meta.transfer_syntax, syntax);
            assert_eq!(back.pixels(), s.pixels());
        }
    }

    #[test]
    fn rescale_identity_case() {
        // Stored 0 with intercept -1024 is air.
        let s = slice(2, 1, vec![-1024.0, 976.0]);
        let bytes = write_dicom(&s, &DicomEncoding::default()).unwrap();
        let back = parse_dicom(&bytes).unwrap();
        assert_eq!(back.pixels(), &[-1024.0, 976.0]);
    }

    #[test]
    fn implicit_without_preamble() {
        let s = slice(3, 2, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let enc = DicomEncoding {
            syntax: TransferSyntax::ImplicitVrLittleEndian,
            with_preamble: false,
            ..Default::default()
        };
        let bytes = write_dicom(&s, &enc).unwrap();
        assert_ne!(&bytes[..4], &[0, 0, 0, 0]);
        assert_eq!(parse_dicom(&bytes).unwrap().pixels(), s.pixels());
    }

    /// Builds an implicit-VR data set from raw elements.
    fn implicit(elements: &[(Tag, Vec<u8>)]) -> Vec<u8> {
        let mut out = Vec::new();
        for (tag, value) in elements {
            put_element(&mut out, *tag, b"UN", value, false);
        }
        out
    }

    fn base_elements(pixel: Vec<u8>) -> Vec<(Tag, Vec<u8>)> {
        vec![
            (tags::SLICE_THICKNESS, b"1.5 ".to_vec()),
            (tags::ROWS, 1u16.to_le_bytes().to_vec()),
            (tags::COLUMNS, 2u16.to_le_bytes().to_vec()),
            (tags::BITS_ALLOCATED, 16u16.to_le_bytes().to_vec()),
            (tags::BITS_STORED, 12u16.to_le_bytes().to_vec()),
            (tags::PIXEL_REPRESENTATION, 0u16.to_le_bytes().to_vec()),
            (tags::RESCALE_INTERCEPT, b"-1024 ".to_vec()),
            (tags::RESCALE_SLOPE, b"1 ".to_vec()),
            (tags::PIXEL_DATA, pixel),
        ]
    }

    #[test]
    fn high_bits_are_masked() {
        // 0xF000 | 5 keeps only the low 12 bits.
        let mut px = 0xF005u16.to_le_bytes().to_vec();
        px.extend_from_slice(&0u16.to_le_bytes());
        let s = parse_dicom(&implicit(&base_elements(px))).unwrap();
        assert_eq!(s.pixels(), &[5.0 - 1024.0, -1024.0]);
    }

    #[test]
    fn signed_pixels_are_sign_extended() {
        let mut el = base_elements({
            let mut px = 0x0FFFu16.to_le_bytes().to_vec();
            px.extend_from_slice(&0x0800u16.to_le_bytes());
            px
        });
        el[5].1 = 1u16.to_le_bytes().to_vec();
        el[6].1 = b"0 ".to_vec();
        let s = parse_dicom(&implicit(&el)).unwrap();
        assert_eq!(s.pixels(), &[-1.0, -2048.0]);
    }

    #[test]
    fn missing_pixel_data() {
        let mut el = base_elements(vec![0; 4]);
        el.pop();
        assert_eq!(parse_dicom(&implicit(&el)), Err(DicomError::MissingTag(tags::PIXEL_DATA)));
    }

    #[test]
    fn pixel_length_mismatch() {
        assert_eq!(
            parse_dicom(&implicit(&base_elements(vec![0; 6]))),
            Err(DicomError::LengthMismatch { expected: 4, actual: 6 })
        );
    }

    #[test]
    fn truncated_element() {
        let bytes = implicit(&base_elements(vec![0; 4]));
        assert!(matches!(parse_dicom(&bytes[..bytes.len() - 1]), Err(DicomError::TruncatedFile(_))));
    }

    #[test]
    fn big_endian_is_rejected() {
        let s = slice(1, 1, vec![0.0]);
        let mut bytes = write_dicom(&s, &DicomEncoding::default()).unwrap();
        // Rewrite the transfer syntax in place: "1.2.840.10008.1.2.1" -> "...1.2.2".
        let uid = ui(EXPLICIT_VR_LITTLE_ENDIAN);
        let at = bytes.windows(uid.len()).position(|w| w == uid.as_slice()).unwrap();
        bytes[at + uid.len() - 2] = b'2';
        assert_eq!(
            parse_dicom(&bytes),
            Err(DicomError::UnsupportedTransferSyntax("1.2.840.10008.1.2.2".into()))
        );
    }

    #[test]
    fn unknown_sequences_are_skipped() {
        let mut bytes = Vec::new();
        // Undefined-length sequence holding one undefined-length item.
        put_element(&mut bytes, Tag(0x0008, 0x1140), b"SQ", &[], false);
        let len_at = bytes.len() - 4;
        bytes[len_at..].copy_from_slice(&UNDEFINED_LENGTH.to_le_bytes());
        bytes.extend_from_slice(&0xFFFEu16.to_le_bytes());
        bytes.extend_from_slice(&0xE000u16.to_le_bytes());
        bytes.extend_from_slice(&UNDEFINED_LENGTH.to_le_bytes());
        put_element(&mut bytes, Tag(0x0008, 0x1150), b"UI", &ui("1.2.3"), false);
        for elem in [0xE00Du16, 0xE0DD] {
            bytes.extend_from_slice(&0xFFFEu16.to_le_bytes());
            bytes.extend_from_slice(&elem.to_le_bytes());
            bytes.extend_from_slice(&0u32.to_le_bytes());
        }
        bytes.extend(implicit(&base_elements(vec![0; 4])));
        assert_eq!(parse_dicom(&bytes).unwrap().pixels(), &[-1024.0, -1024.0]);
    }

    #[test]
    fn encapsulated_pixel_data_is_rejected() {
        let mut el = base_elements(vec![]);
        el.pop();
        let mut bytes = implicit(&el);
        bytes.extend_from_slice(&0x7FE0u16.to_le_bytes());
        bytes.extend_from_slice(&0x0010u16.to_le_bytes());
        bytes.extend_from_slice(&UNDEFINED_LENGTH.to_le_bytes());
        assert!(matches!(parse_dicom(&bytes), Err(DicomError::UnsupportedTransferSyntax(_))));
    }

    #[test]
    fn writer_rejects_out_of_range_hu() {
        let s = slice(1, 1, vec![-2000.0]);
        assert!(write_dicom(&s, &DicomEncoding::default()).is_err());
    }
}
