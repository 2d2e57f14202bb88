//! Serialization helpers shared by every report: floats with 17 significant
//! digits, rationals as `"p/q"` strings, and the schema version tag.

use serde::ser::{Error as _, SerializeSeq};
use serde::Serializer;
use serde_json::value::RawValue;

use crate::rational_poly::{format_rational, Poly, Rational};

pub const SCHEMA_VERSION: u32 = 1;

/// The JSON text of `x` with 17 significant digits, or `null` if not finite.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

pub fn sig17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(format_f64(*x)).map_err(S::Error::custom)?;
    s.serialize_some(&raw)
}

pub fn sig17_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => sig17(v, s),
        None => s.serialize_none(),
    }
}

pub fn sig17_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        let raw = RawValue::from_string(format_f64(*x)).map_err(S::Error::custom)?;
        seq.serialize_element(&raw)?;
    }
    seq.end()
}

pub fn rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

pub fn rational_opt<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(v) => rational(v, s),
        None => s.serialize_none(),
    }
}

/// Coefficients in ascending degree, each as a `"p/q"` string.
pub fn poly<S: Serializer>(p: &Poly, s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(p.coeffs().len()))?;
    for c in p.coeffs() {
        seq.serialize_element(&format_rational(c))?;
    }
    seq.end()
}

/// Two-or-more column CSV with a header row, floats at 17 significant digits.
pub fn csv_columns(header: &[&str], columns: &[&[f64]]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    let rows = columns.iter().map(|c| c.len()).min().unwrap_or(0);
    for i in 0..rows {
        let row: Vec<String> = columns.iter().map(|c| format_f64(c[i])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
