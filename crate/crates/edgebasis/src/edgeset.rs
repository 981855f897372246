//! EDGESET v1 text format.
//!
//! ```text
//! EDGESET 1
//! <width> <height> <count>
//! x y theta kappa confidence reliable
//! ```
//!
//! Reals are written with six fractional digits, so a parsed file serializes
//! back to the same bytes.

use std::fmt::Write as _;

use edgebasis_core::{Edge, EdgeSet, Error as CoreError};

const MAGIC: &str = "EDGESET";
const VERSION: &str = "1";
const QUANTUM: f64 = 1e-6;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("not an EDGESET file")]
    NotEdgeSet,
    #[error("unsupported EDGESET version `{0}`")]
    Version(String),
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount { line: usize, expected: usize, found: usize },
    #[error("line {line}: malformed {field} `{text}`")]
    BadNumber { line: usize, field: &'static str, text: String },
    #[error("line {line}: {reason}")]
    Range { line: usize, reason: String },
    #[error("header announces {expected} edges, file has {found}")]
    CountMismatch { expected: usize, found: usize },
}

fn fixed(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_owned()
    } else {
        s
    }
}

/// Fixed-point text for a value that must stay below `bound` once parsed.
fn fixed_below(v: f64, bound: f64) -> String {
    let s = fixed(v);
    if s.parse::<f64>().expect("formatted float") < bound {
        return s;
    }
    let mut q = (bound / QUANTUM).floor() * QUANTUM;
    while q >= bound {
        q -= QUANTUM;
    }
    fixed(q)
}

pub fn serialize(set: &EdgeSet) -> String {
    let mut out = format!("{MAGIC} {VERSION}\n{} {} {}\n", set.width(), set.height(), set.len());
    let tau = std::f64::consts::TAU;
    for e in set.edges() {
        writeln!(
            out,
            "{} {} {} {} {} {}",
            fixed_below(e.x, set.width() as f64),
            fixed_below(e.y, set.height() as f64),
            fixed_below(e.theta, tau),
            fixed(e.kappa),
            fixed(e.confidence),
            u8::from(e.reliable)
        )
        .expect("write to String");
    }
    out
}

fn number(text: &str, line: usize, field: &'static str) -> Result<f64, ParseError> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ParseError::BadNumber { line, field, text: text.to_owned() })
}

fn integer(text: &str, line: usize, field: &'static str) -> Result<usize, ParseError> {
    text.parse().map_err(|_| ParseError::BadNumber { line, field, text: text.to_owned() })
}

fn fields(line: &str, number: usize, expected: usize) -> Result<Vec<&str>, ParseError> {
    let f: Vec<&str> = line.split_ascii_whitespace().collect();
    if f.len() != expected {
        return Err(ParseError::FieldCount { line: number, expected, found: f.len() });
    }
    Ok(f)
}

pub fn parse(text: &str) -> Result<EdgeSet, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or(ParseError::NotEdgeSet)?;
    let head: Vec<&str> = first.split_ascii_whitespace().collect();
    match head.as_slice() {
        [MAGIC, VERSION] => {}
        [MAGIC, v] => return Err(ParseError::Version((*v).to_owned())),
        _ => return Err(ParseError::NotEdgeSet),
    }
    let (ln, dims) = lines.next().ok_or(ParseError::FieldCount { line: 2, expected: 3, found: 0 })?;
    let dims = fields(dims, ln, 3)?;
    let width = integer(dims[0], ln, "width")?;
    let height = integer(dims[1], ln, "height")?;
    let count = integer(dims[2], ln, "count")?;
    if width == 0 || height == 0 {
        return Err(ParseError::Range { line: ln, reason: "frame dimensions must be positive".into() });
    }

    let mut edges = Vec::with_capacity(count.min(1 << 20));
    let mut line_of = Vec::with_capacity(count.min(1 << 20));
    for (ln, line) in lines {
        let f = fields(line, ln, 6)?;
        let reliable = match f[5] {
            "1" => true,
            "0" => false,
            other => return Err(ParseError::BadNumber { line: ln, field: "reliable", text: other.to_owned() }),
        };
        edges.push(Edge {
            x: number(f[0], ln, "x")?,
            y: number(f[1], ln, "y")?,
            theta: number(f[2], ln, "theta")?,
            kappa: number(f[3], ln, "kappa")?,
            confidence: number(f[4], ln, "confidence")?,
            reliable,
        });
        line_of.push(ln);
    }
    if edges.len() != count {
        return Err(ParseError::CountMismatch { expected: count, found: edges.len() });
    }
    EdgeSet::new(width, height, edges).map_err(|e| match e {
        CoreError::InvalidEdge { index, reason } => ParseError::Range { line: line_of[index], reason: reason.to_owned() },
        other => ParseError::Range { line: 2, reason: other.to_string() },
    })
}

/// Snaps every value to the file grid, as a save/load round trip would.
pub fn quantized(set: &EdgeSet) -> EdgeSet {
    parse(&serialize(set)).expect("serialized sets parse")
}
