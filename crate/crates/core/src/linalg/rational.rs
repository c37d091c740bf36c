//! Rational scalars and their textual form.
//!
//! Entries are written either as bare integers or as `"p/q"` strings with
//! `q > 1` and `gcd(p, q) = 1`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("denominator must be positive in `{0}`")]
    NegativeDenominator(String),
    #[error("`{0}` is not in lowest terms")]
    NotReduced(String),
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Strict parser: rejects `2/4`, `1/-3`, `3/1` and anything with whitespace.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(s.to_string());
    let parse_int = |t: &str| -> Result<BigInt, ParseRationalError> {
        let digits = t.strip_prefix('-').unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        BigInt::from_str(t).map_err(|_| malformed())
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let num = parse_int(n)?;
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(s.to_string()));
            }
            if den.is_negative() {
                return Err(ParseRationalError::NegativeDenominator(s.to_string()));
            }
            if den.is_one() || !num.gcd(&den).is_one() {
                return Err(ParseRationalError::NotReduced(s.to_string()));
            }
            Ok(Rational::new_raw(num, den))
        }
    }
}

/// Lowest-terms `p/q`, or the bare integer when `q = 1`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// JSON form: a number when the value is an integer that fits in `i64`,
/// otherwise a string.
pub fn rational_to_json(r: &Rational) -> serde_json::Value {
    if r.is_integer() {
        if let Some(v) = r.numer().to_i64() {
            return serde_json::Value::from(v);
        }
    }
    serde_json::Value::String(format_rational(r))
}

pub fn rational_from_json(v: &serde_json::Value) -> Result<Rational, ParseRationalError> {
    match v {
        serde_json::Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(int(i)),
            None => Err(ParseRationalError::Malformed(n.to_string())),
        },
        serde_json::Value::String(s) => parse_rational(s),
        other => Err(ParseRationalError::Malformed(other.to_string())),
    }
}
