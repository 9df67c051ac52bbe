//! Serialization conventions shared by every machine-readable output:
//! floats carry 17 significant digits, exact rationals are `"num/den"`
//! strings, and JSON documents start with `"schema": "1"`.

use num_bigint::BigInt;
use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::scalar::Exact;

pub const SCHEMA_VERSION: &str = "1";

/// `x` with 17 significant digits; `inf`, `-inf` and `nan` for the rest.
pub fn float17_string(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Serializes a float as a bare JSON number with 17 significant digits, or
/// as the string `"-inf"`/`"inf"`/`"nan"` when it is not finite.
pub fn float17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        let raw = RawValue::from_string(float17_string(*x)).map_err(S::Error::custom)?;
        raw.serialize(s)
    } else {
        s.serialize_str(&float17_string(*x))
    }
}

pub fn opt_float17<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => float17(v, s),
        None => s.serialize_none(),
    }
}

pub fn float17_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&Float17(*x))?;
    }
    seq.end()
}

/// Newtype that serializes through [`float17`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Float17(pub f64);

impl Serialize for Float17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        float17(&self.0, s)
    }
}

/// Serializes an exact rational as `"num/den"`.
pub fn fraction<T: Exact, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.fraction_string())
}

pub fn opt_fraction<T: Exact, S: Serializer>(x: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => fraction(v, s),
        None => s.serialize_none(),
    }
}

/// Serializes a big integer as a bare JSON integer.
pub fn bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(x.to_string()).map_err(S::Error::custom)?;
    raw.serialize(s)
}

/// Renders CSV with a header row, comma separators and LF line endings.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
