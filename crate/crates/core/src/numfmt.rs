//! Decimal output with 17 significant digits.
//!
//! Seventeen significant digits are enough for any `f64` to survive a
//! text round trip bit-for-bit, so every number the crate writes (CSV,
//! JSON, key=value documents) goes through [`sig17`].

use std::str::FromStr;

use serde::Serializer;

/// Formats `x` in scientific notation with 17 significant digits.
///
/// Non-finite values are written as `nan`, `inf` and `-inf`.
pub fn sig17(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// JSON number carrying the 17-digit text verbatim; `null` when not finite.
pub fn json_number(x: f64) -> serde_json::Value {
    if !x.is_finite() {
        return serde_json::Value::Null;
    }
    match serde_json::Number::from_str(&sig17(x)) {
        Ok(n) => serde_json::Value::Number(n),
        Err(_) => serde_json::Value::Null,
    }
}

pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    use serde::Serialize;
    json_number(*x).serialize(s)
}

pub fn serialize_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => serialize(v, s),
        None => s.serialize_none(),
    }
}
