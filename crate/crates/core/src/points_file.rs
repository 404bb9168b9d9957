//! Plain-text point files: one `x y` pair per line, whitespace separated.
//! `#` starts a comment; blank lines are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geom::Point2;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

pub fn parse_points(text: &str) -> Result<Vec<Point2>, ParseError> {
    let mut points = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| ParseError { line: k + 1, message };
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(err(format!("expected 2 coordinates, found {}", fields.len())));
        }
        let coord = |s: &str| -> Result<f64, ParseError> {
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                Ok(_) => Err(err(format!("coordinate {s:?} is not finite"))),
                Err(_) => Err(err(format!("cannot parse {s:?} as a number"))),
            }
        };
        points.push(Point2::new(coord(fields[0])?, coord(fields[1])?));
    }
    Ok(points)
}

/// Text that parses back to exactly `points`.
pub fn format_points(points: &[Point2]) -> String {
    let mut out = String::new();
    for p in points {
        // `{:?}` prints the shortest representation that round-trips
        writeln!(out, "{:?} {:?}", p.x, p.y).expect("writing to a String cannot fail");
    }
    out
}
