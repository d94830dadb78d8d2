//! Binary and ASCII STL.
//!
//! Writers quantize vertices to `f32` and recompute each facet normal from
//! the quantized winding, so output never depends on stored normals. The
//! reader merges vertices with bit-identical `f32` coordinates.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{triangle_normal, Facet, TriangleMesh, Vertex};

pub const HEADER_LEN: usize = 80;
pub const FACET_LEN: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StlError {
    #[error("{0} facets exceed the binary STL limit")]
    TooManyFacets(usize),
    #[error("header is {0} bytes, at most 80 allowed")]
    HeaderTooLong(usize),
    #[error("malformed STL at line {line}: {reason}")]
    MalformedAscii { line: usize, reason: String },
    #[error("malformed STL: {0}")]
    MalformedStl(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StlFormat {
    #[default]
    Binary,
    Ascii,
}

fn quantize(v: &Vertex) -> [f32; 3] {
    [v.x as f32, v.y as f32, v.z as f32]
}

fn widen(v: [f32; 3]) -> Vertex {
    Vertex::new(f64::from(v[0]), f64::from(v[1]), f64::from(v[2]))
}

/// Quantized corners and the normal of their winding.
fn quantized_facet(mesh: &TriangleMesh, facet: &Facet) -> ([f32; 3], [[f32; 3]; 3]) {
    let q = facet.indices.map(|i| quantize(&mesh.vertices()[i]));
    let [a, b, c] = q.map(widen);
    let n = triangle_normal(&a, &b, &c);
    ([n.x as f32, n.y as f32, n.z as f32], q)
}

pub fn write_binary_stl(mesh: &TriangleMesh, header: &str) -> Result<Vec<u8>, StlError> {
    if header.len() > HEADER_LEN {
        return Err(StlError::HeaderTooLong(header.len()));
    }
    let count = u32::try_from(mesh.facet_count()).map_err(|_| StlError::TooManyFacets(mesh.facet_count()))?;
    let mut out = Vec::with_capacity(HEADER_LEN + 4 + FACET_LEN * mesh.facet_count());
    out.extend_from_slice(header.as_bytes());
    out.resize(HEADER_LEN, 0);
    out.extend_from_slice(&count.to_le_bytes());
    for f in mesh.facets() {
        let (n, corners) = quantized_facet(mesh, f);
        for v in std::iter::once(n).chain(corners) {
            for c in v {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
        out.extend_from_slice(&[0, 0]);
    }
    Ok(out)
}

/// Nine significant digits with a C-style signed two-digit exponent,
/// e.g. `-1.25000000e+02`.
fn sci(v: f32) -> String {
    let s = format!("{:.8e}", f64::from(v));
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn write_ascii_stl(mesh: &TriangleMesh, name: &str) -> String {
    let mut out = format!("solid {name}\n");
    for f in mesh.facets() {
        let (n, corners) = quantized_facet(mesh, f);
        let triple = |v: [f32; 3]| format!("{} {} {}", sci(v[0]), sci(v[1]), sci(v[2]));
        writeln!(out, "  facet normal {}", triple(n)).unwrap();
        out.push_str("    outer loop\n");
        for v in corners {
            writeln!(out, "      vertex {}", triple(v)).unwrap();
        }
        out.push_str("    endloop\n  endfacet\n");
    }
    writeln!(out, "endsolid {name}").unwrap();
    out
}

pub fn write_stl(mesh: &TriangleMesh, format: StlFormat, name: &str) -> Result<Vec<u8>, StlError> {
    match format {
        StlFormat::Binary => write_binary_stl(mesh, name),
        StlFormat::Ascii => Ok(write_ascii_stl(mesh, name).into_bytes()),
    }
}

/// One facet as read: normal and three corners.
type RawFacet = ([f32; 3], [[f32; 3]; 3]);

fn parse_ascii(text: &str) -> Result<Vec<RawFacet>, StlError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty());
    let bad = |line: usize, reason: &str| StlError::MalformedAscii { line, reason: reason.to_string() };
    let mut last = 1;
    let mut next = |want: &str| -> Result<(usize, Vec<&str>), StlError> {
        let (line, tokens) = lines.next().ok_or_else(|| bad(last, &format!("unexpected end of input, expected {want}")))?;
        last = line;
        Ok((line, tokens))
    };
    let floats = |line: usize, tokens: &[&str]| -> Result<[f32; 3], StlError> {
        if tokens.len() != 3 {
            return Err(bad(line, "expected three numbers"));
        }
        let mut v = [0f32; 3];
        for (slot, t) in v.iter_mut().zip(tokens) {
            *slot = t.parse::<f32>().ok().filter(|x| x.is_finite()).ok_or_else(|| bad(line, "bad number"))?;
        }
        Ok(v)
    };

    let (line, head) = next("solid")?;
    if head[0] != "solid" {
        return Err(bad(line, "expected solid"));
    }
    let mut facets = Vec::new();
    loop {
        let (line, t) = next("facet or endsolid")?;
        match t[0] {
            "endsolid" => break,
            "facet" if t.get(1) == Some(&"normal") => {
                let n = floats(line, &t[2..])?;
                let (line, t) = next("outer loop")?;
                if t != ["outer", "loop"] {
                    return Err(bad(line, "expected outer loop"));
                }
                let mut corners = [[0f32; 3]; 3];
                for c in corners.iter_mut() {
                    let (line, t) = next("vertex")?;
                    if t[0] != "vertex" {
                        return Err(bad(line, "expected vertex"));
                    }
                    *c = floats(line, &t[1..])?;
                }
                for want in ["endloop", "endfacet"] {
                    let (line, t) = next(want)?;
                    if t != [want] {
                        return Err(bad(line, &format!("expected {want}")));
                    }
                }
                facets.push((n, corners));
            }
            _ => return Err(bad(line, "expected facet normal or endsolid")),
        }
    }
    if let Some((line, _)) = lines.next() {
        return Err(bad(line, "content after endsolid"));
    }
    Ok(facets)
}

fn parse_binary(bytes: &[u8]) -> Result<Vec<RawFacet>, StlError> {
    if bytes.len() < HEADER_LEN + 4 {
        return Err(StlError::MalformedStl(format!("{} bytes is shorter than a binary header", bytes.len())));
    }
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    let expected = (count as u64) * FACET_LEN as u64 + (HEADER_LEN + 4) as u64;
    if bytes.len() as u64 != expected {
        return Err(StlError::MalformedStl(format!(
            "binary size {} does not match {} for {count} facets",
            bytes.len(),
            expected
        )));
    }
    let f = |b: &[u8]| f32::from_le_bytes(b.try_into().unwrap());
    Ok(bytes[84..]
        .chunks_exact(FACET_LEN)
        .map(|c| {
            let v = |k: usize| [f(&c[12 * k..12 * k + 4]), f(&c[12 * k + 4..12 * k + 8]), f(&c[12 * k + 8..12 * k + 12])];
            (v(0), [v(1), v(2), v(3)])
        })
        .collect())
}

fn build(raw: Vec<RawFacet>) -> TriangleMesh {
    let mut mesh = TriangleMesh::new();
    let mut index: HashMap<[u32; 3], usize> = HashMap::new();
    for (n, corners) in raw {
        // +0.0 folds negative zero onto zero.
        let indices = corners.map(|v| {
            let key = v.map(|c| (c + 0.0).to_bits());
            *index.entry(key).or_insert_with(|| mesh.add_vertex(widen(v)))
        });
        let stored = Vector3::new(f64::from(n[0]), f64::from(n[1]), f64::from(n[2]));
        let normal = if stored.norm() > 0.0 && stored.iter().all(|c| c.is_finite()) {
            stored.normalize()
        } else {
            let [a, b, c] = indices.map(|i| mesh.vertices()[i]);
            triangle_normal(&a, &b, &c)
        };
        mesh.add_facet(Facet { indices, normal });
    }
    mesh
}

/// Reads ASCII when the text starts with `solid` and parses cleanly,
/// otherwise binary.
pub fn read_stl(bytes: &[u8]) -> Result<TriangleMesh, StlError> {
    let looks_ascii = bytes.trim_ascii_start().starts_with(b"solid");
    if looks_ascii {
        let ascii = std::str::from_utf8(bytes)
            .map_err(|e| StlError::MalformedStl(e.to_string()))
            .and_then(parse_ascii);
        match ascii {
            Ok(raw) => return Ok(build(raw)),
            Err(e) => {
                return parse_binary(bytes).map(build).map_err(|_| e);
            }
        }
    }
    parse_binary(bytes).map(build)
}
