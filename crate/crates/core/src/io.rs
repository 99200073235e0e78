//! Text formats for equations, transformations and frames.
//!
//! Every format is a list of `key = <expr>` lines. Blank lines and lines
//! starting with `#` are ignored.
//!
//! ```text
//! # equation: keys A, B, C, a, b, c in this order
//! A = 1
//! B = 0
//! C = -1
//! a = 0
//! b = 1/y
//! c = 0
//! ```
//!
//! A transformation has `h` plus either `xi`, `eta` or `g11`, `g12`, `g21`,
//! `g22`. A frame has `E11`, `E12`, `E21`, `E22`.

use crate::equation::{Lpde, COEFF_NAMES};
use crate::error::{Error, Result};
use crate::expr::{parse_expr, EqOracle, Expr, Mat2};
use crate::frame::Frame;
use crate::transform::Transformation;

const MAP_KEYS: [&str; 2] = ["xi", "eta"];
const MATRIX_KEYS: [&str; 4] = ["g11", "g12", "g21", "g22"];
const FRAME_KEYS: [&str; 4] = ["E11", "E12", "E21", "E22"];

struct Entry {
    line: usize,
    key: String,
    value: Expr,
}

fn entries(text: &str) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, rhs) =
            trimmed.split_once('=').ok_or_else(|| Error::Format(format!("line {line}: expected `key = expr`")))?;
        let key = key.trim().to_string();
        if out.iter().any(|e| e.key == key) {
            return Err(Error::Format(format!("line {line}: duplicate key `{key}`")));
        }
        let value = parse_expr(rhs).map_err(|e| Error::Format(format!("line {line}: {e}")))?;
        out.push(Entry { line, key, value });
    }
    Ok(out)
}

fn take(entries: &[Entry], keys: &[&str]) -> Option<Vec<Expr>> {
    keys.iter().map(|k| entries.iter().find(|e| e.key == *k).map(|e| e.value.clone())).collect()
}

fn reject_unknown(entries: &[Entry], allowed: &[&str]) -> Result<()> {
    match entries.iter().find(|e| !allowed.contains(&e.key.as_str())) {
        Some(e) => Err(Error::Format(format!("line {}: unexpected key `{}`", e.line, e.key))),
        None => Ok(()),
    }
}

/// Parses the six-line equation format; keys are case-sensitive and must
/// appear in the order `A, B, C, a, b, c`.
pub fn parse_equation(text: &str) -> Result<Lpde> {
    let entries = entries(text)?;
    if entries.len() != 6 {
        return Err(Error::Format(format!("expected 6 coefficients, found {}", entries.len())));
    }
    for (e, want) in entries.iter().zip(COEFF_NAMES) {
        if e.key != want {
            return Err(Error::Format(format!("line {}: expected key `{want}`, found `{}`", e.line, e.key)));
        }
    }
    let mut values = entries.into_iter().map(|e| e.value);
    Ok(Lpde::from_array(std::array::from_fn(|_| values.next().expect("six entries"))))
}

/// Parses a transformation. Maps are differentiated in `fr`.
pub fn parse_transformation(text: &str, fr: &Frame, o: &EqOracle) -> Result<Transformation> {
    let entries = entries(text)?;
    let h = take(&entries, &["h"]).ok_or_else(|| Error::Format("missing key `h`".into()))?.remove(0);
    if let Some([xi, eta]) = take(&entries, &MAP_KEYS).map(|v| <[Expr; 2]>::try_from(v).expect("two")) {
        reject_unknown(&entries, &["h", "xi", "eta"])?;
        return Transformation::from_maps_in(h, xi, eta, fr, o);
    }
    if let Some([a, b, c, d]) = take(&entries, &MATRIX_KEYS).map(|v| <[Expr; 4]>::try_from(v).expect("four")) {
        reject_unknown(&entries, &["h", "g11", "g12", "g21", "g22"])?;
        return Transformation::from_matrix(h, Mat2::new(a, b, c, d), o);
    }
    Err(Error::Format("expected keys `xi`, `eta` or `g11`, `g12`, `g21`, `g22`".into()))
}

/// Parses a frame matrix `E`.
pub fn parse_frame(text: &str, o: &EqOracle) -> Result<Frame> {
    let entries = entries(text)?;
    reject_unknown(&entries, &FRAME_KEYS)?;
    let [a, b, c, d] = take(&entries, &FRAME_KEYS)
        .map(|v| <[Expr; 4]>::try_from(v).expect("four"))
        .ok_or_else(|| Error::Format("expected keys `E11`, `E12`, `E21`, `E22`".into()))?;
    Frame::new(Mat2::new(a, b, c, d), o)
}

/// Writes an equation in the format [`parse_equation`] reads.
pub fn format_equation(v: &Lpde) -> String {
    COEFF_NAMES.iter().zip(v.components()).map(|(k, e)| format!("{k} = {e}\n")).collect()
}
