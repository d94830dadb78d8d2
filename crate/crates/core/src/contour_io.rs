//! Plain-text contour point files: one `x y` pair per line, contours
//! separated by blank lines. Lines starting with `#` are comments.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{ContourError, ContourPolyline, Point};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PointFileError {
    #[error("line {line}: {reason}")]
    MalformedPointFile { line: usize, reason: String },
    #[error("contour ending at line {line}: {source}")]
    Contour { line: usize, source: ContourError },
}

pub fn parse_points(text: &str) -> Result<Vec<ContourPolyline>, PointFileError> {
    let mut contours = Vec::new();
    let mut current: Vec<Point> = Vec::new();
    let mut last_line = 0;
    let flush = |pts: &mut Vec<Point>, line: usize, out: &mut Vec<ContourPolyline>| {
        if pts.is_empty() {
            return Ok(());
        }
        let c = ContourPolyline::new(std::mem::take(pts)).map_err(|source| PointFileError::Contour { line, source })?;
        out.push(c);
        Ok(())
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.starts_with('#') {
            continue;
        }
        if trimmed.is_empty() {
            flush(&mut current, last_line, &mut contours)?;
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let mut coord = |name: &str| -> Result<f64, PointFileError> {
            let field = fields
                .next()
                .ok_or_else(|| PointFileError::MalformedPointFile { line, reason: format!("missing {name}") })?;
            field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| PointFileError::MalformedPointFile { line, reason: format!("bad {name} {field:?}") })
        };
        let x = coord("x")?;
        let y = coord("y")?;
        if fields.next().is_some() {
            return Err(PointFileError::MalformedPointFile { line, reason: "expected exactly two numbers".into() });
        }
        current.push(Point::new(x, y));
        last_line = line;
    }
    flush(&mut current, last_line, &mut contours)?;
    Ok(contours)
}

/// Reads a file that must hold exactly one contour.
pub fn parse_single(text: &str) -> Result<ContourPolyline, PointFileError> {
    let mut cs = parse_points(text)?;
    match cs.len() {
        1 => Ok(cs.remove(0)),
        n => Err(PointFileError::MalformedPointFile {
            line: text.lines().count(),
            reason: format!("expected one contour, found {n}"),
        }),
    }
}

/// Shortest round-trip formatting of every coordinate.
pub fn format_points(contours: &[ContourPolyline]) -> String {
    let mut out = String::new();
    for (k, c) in contours.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        for p in c.points() {
            writeln!(out, "{} {}", p.x, p.y).expect("writing to a String");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_contours_round_trip() {
        let a = ContourPolyline::from_xy(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]).unwrap();
        let b = ContourPolyline::from_xy(&[(0.1, 0.2), (3.5, -1e-7), (2.0, 4.0), (0.0, 4.0)]).unwrap();
        let text = format_points(&[a.clone(), b.clone()]);
        assert_eq!(parse_points(&text).unwrap(), vec![a, b]);
    }

    #[test]
    fn comments_and_extra_blank_lines() {
        let cs = parse_points("# layer 1\n\n0 0\n1 0\n1 1\n\n\n5 5\n6 5\n6 6\n5 6\n").unwrap();
        assert_eq!(cs.iter().map(ContourPolyline::len).collect::<Vec<_>>(), vec![3, 4]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(
            parse_points("0 0\n1 x\n"),
            Err(PointFileError::MalformedPointFile { line: 2, reason: "bad y \"x\"".into() })
        );
        assert!(matches!(
            parse_points("0 0\n1 0 5\n"),
            Err(PointFileError::MalformedPointFile { line: 2, .. })
        ));
        assert!(matches!(
            parse_points("0 0\n1 0\n\n"),
            Err(PointFileError::Contour { line: 2, source: ContourError::TooFewPoints(2) })
        ));
    }

    #[test]
    fn single_contour_required() {
        assert!(parse_single("0 0\n1 0\n1 1\n\n5 5\n6 5\n6 6\n").is_err());
        assert!(parse_single("0 0\n1 0\n1 1\n").is_ok());
    }
}
