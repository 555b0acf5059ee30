//! The exact scalar type and its textual forms.
//!
//! Every quantity in the crate is a [`Rational`]. On the wire a rational is a
//! string: `"a/b"`, `"a"`, or a finite decimal such as `"0.4"` (read exactly
//! as `2/5`).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision fraction, always in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational {text:?}: {reason}")]
pub struct ParseRationalError {
    pub text: String,
    pub reason: &'static str,
}

fn parse_err(text: &str, reason: &'static str) -> ParseRationalError {
    ParseRationalError {
        text: text.to_string(),
        reason,
    }
}

fn parse_int(text: &str, digits: &str) -> Result<BigInt, ParseRationalError> {
    if digits.is_empty() {
        return Err(parse_err(text, "missing digits"));
    }
    let body = digits.strip_prefix(['+', '-']).unwrap_or(digits);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_err(text, "expected decimal digits"));
    }
    digits
        .parse::<BigInt>()
        .map_err(|_| parse_err(text, "expected decimal digits"))
}

/// Parses `"a/b"`, `"a"` or a finite decimal (`"-0.125"`, `"3."`, `".5"`).
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(parse_err(text, "empty string"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_int(text, num.trim())?;
        let den = parse_int(text, den.trim())?;
        if den.is_zero() {
            return Err(parse_err(text, "zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let (negative, int_digits) = match int_part.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        if int_digits.is_empty() && frac_part.is_empty() {
            return Err(parse_err(text, "missing digits"));
        }
        let all_digits = |d: &str| d.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(int_digits) || !all_digits(frac_part) {
            return Err(parse_err(text, "expected decimal digits"));
        }
        let mut digits = String::with_capacity(int_digits.len() + frac_part.len() + 1);
        digits.push('0');
        digits.push_str(int_digits);
        digits.push_str(frac_part);
        let num: BigInt = digits
            .parse()
            .map_err(|_| parse_err(text, "expected decimal digits"))?;
        let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
        let value = Rational::new(num, den);
        return Ok(if negative { -value } else { value });
    }
    Ok(Rational::from_integer(parse_int(text, s)?))
}

/// `"a"` for integers, `"a/b"` otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Decimal rendering rounded half away from zero to `places` digits.
/// Approximate by construction; only for human consumption.
pub fn to_decimal_string(value: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), places);
    let scaled = value.abs() * Rational::from_integer(scale.clone());
    let rounded = (scaled + Rational::new(BigInt::one(), BigInt::from(2))).floor();
    let digits = rounded.to_integer();
    let (int_part, frac_part) = digits.div_rem(&scale);
    let sign = if value.is_negative() && !digits.is_zero() {
        "-"
    } else {
        ""
    };
    if places == 0 {
        return format!("{sign}{int_part}");
    }
    format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = places)
}

/// Lossy conversion for plotting or quick inspection.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Display adaptor printing a rational in wire form.
pub struct Exact<'a>(pub &'a Rational);

impl fmt::Display for Exact<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(self.0))
    }
}

/// Lowest common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// `serde(with = ...)` helpers for rationals in wire form.
pub mod serde_rational {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        from_json(&v).map_err(de::Error::custom)
    }

    /// Accepts a string in wire form or a JSON number (read by its decimal text).
    pub fn from_json(v: &serde_json::Value) -> Result<Rational, ParseRationalError> {
        match v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => parse_rational(&n.to_string()),
            other => Err(ParseRationalError {
                text: other.to_string(),
                reason: "expected a string or number",
            }),
        }
    }
}

/// Same as [`serde_rational`] for `Vec<Rational>`.
pub mod serde_rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&format_rational(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<serde_json::Value>::deserialize(d)?;
        raw.iter()
            .map(|v| super::serde_rational::from_json(v).map_err(de::Error::custom))
            .collect()
    }
}
