//! Exact rational scalars, the `[1, inf]` exponent type, and their text forms.
//!
//! Rationals are written `"a/b"` or as decimal literals; decimals convert
//! exactly (`"0.1"` is 1/10, not the nearest double). Exponents accept the
//! same forms plus the spelling `"inf"`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rat = num_rational::BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational from an `f64` (every finite double is a dyadic rational).
pub fn rat_from_f64(v: f64) -> Result<Rat> {
    Rat::from_float(v).ok_or_else(|| Error::Parse(format!("non-finite float {v}")))
}

/// Parse `"a/b"`, an integer, or a decimal/scientific literal, exactly.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let numer = BigInt::from_str(n.trim())
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let denom = BigInt::from_str(d.trim())
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if denom.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(numer, denom));
    }
    parse_decimal(s)
}

/// Exact value of a decimal literal with optional exponent part.
fn parse_decimal(s: &str) -> Result<Rat> {
    let bad = || Error::Parse(format!("bad rational literal {s:?}"));
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(bad());
    }
    let numer = BigInt::from_str(&digits).map_err(|_| bad())?;
    let shift = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let pow = num_traits::pow::pow(ten, shift.unsigned_abs() as usize);
    Ok(if shift >= 0 {
        Rat::from_integer(numer * pow)
    } else {
        Rat::new(numer, pow)
    })
}

/// Canonical text form: `"3"`, `"-3/4"`.
pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

/// A JSON scalar that is either a string or a number literal; numbers keep
/// their decimal representation thanks to `arbitrary_precision`.
#[derive(Deserialize)]
#[serde(untagged)]
enum TextOrNumber {
    Text(String),
    Number(serde_json::Number),
}

impl TextOrNumber {
    fn into_rat(self) -> Result<Rat> {
        match self {
            TextOrNumber::Text(s) => parse_rat(&s),
            TextOrNumber::Number(n) => parse_rat(&n.to_string()),
        }
    }
}

/// serde adapter for `Rat` fields: serialize as `"a/b"`, accept strings or
/// exact decimal numbers.
pub mod rat_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Rat, D::Error> {
        TextOrNumber::deserialize(de)?
            .into_rat()
            .map_err(D::Error::custom)
    }
}

/// An exponent in `[1, inf]`: a rational `p >= 1` or the `inf` sentinel.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rat),
    Infinity,
}

impl Exponent {
    pub fn finite(p: Rat) -> Result<Self> {
        if p < Rat::one() {
            return Err(Error::Parse(format!("exponent {p} below 1")));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn one() -> Self {
        Exponent::Finite(Rat::one())
    }

    pub fn two() -> Self {
        Exponent::Finite(rat_int(2))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Exponent::Finite(p) if p.is_one())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Exponent::Finite(p) => rat_to_f64(p),
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Exponent::Finite(p) => Some(p),
            Exponent::Infinity => None,
        }
    }

    /// Integer value when the exponent is a whole number.
    pub fn as_integer(&self) -> Option<u32> {
        match self {
            Exponent::Finite(p) if p.is_integer() => p.to_integer().to_u32(),
            _ => None,
        }
    }

    /// The conjugate exponent: `1/p + 1/q = 1`, with `1` and `inf` paired.
    pub fn conjugate(&self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::one(),
            Exponent::Finite(p) if p.is_one() => Exponent::Infinity,
            Exponent::Finite(p) => {
                let one = Rat::one();
                Exponent::Finite(p.clone() / (p.clone() - one))
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        if s.eq_ignore_ascii_case("inf") {
            return Ok(Exponent::Infinity);
        }
        Exponent::finite(parse_rat(s)?)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Exponent::parse(s)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = TextOrNumber::deserialize(de)?;
        match raw {
            TextOrNumber::Text(s) => Exponent::parse(&s).map_err(D::Error::custom),
            TextOrNumber::Number(n) => {
                let r = parse_rat(&n.to_string()).map_err(D::Error::custom)?;
                Exponent::finite(r).map_err(D::Error::custom)
            }
        }
    }
}

/// `|r|` as a helper, since call sites read better than method chains.
pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}
