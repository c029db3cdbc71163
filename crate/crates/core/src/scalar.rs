//! Arithmetic modes: exact rationals and `f64`.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, NumAssign, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{MmotError, Result};

pub type Rational = BigRational;

/// Arithmetic mode requested by callers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Float,
}

impl FromStr for Mode {
    type Err = MmotError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Mode::Rational),
            "float" => Ok(Mode::Float),
            other => Err(MmotError::input(format!("unknown mode `{other}`"))),
        }
    }
}

/// Field operations shared by both modes. Tolerances collapse to zero in exact mode.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + NumAssign + Signed + Send + Sync + 'static
{
    const EXACT: bool;
    const MODE: Mode;

    /// `t` in float mode, zero in exact mode.
    fn tol(t: f64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_rational(&self) -> Rational;
    fn to_f64(&self) -> f64;
    /// Parses an integer, decimal (optional exponent) or `p/q` literal.
    fn parse_literal(s: &str) -> Option<Self>;

    fn from_usize(v: usize) -> Self {
        Self::from_ratio(v as i64, 1)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: Mode = Mode::Float;

    fn tol(t: f64) -> Self {
        t
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Rational {
        Rational::from_f64(*self).unwrap_or_else(Rational::zero)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse_literal(s: &str) -> Option<Self> {
        if s.contains('/') {
            parse_rational(s).map(|r| Self::from_rational(&r))
        } else {
            s.parse::<f64>().ok().filter(|v| v.is_finite())
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE: Mode = Mode::Rational;

    fn tol(_t: f64) -> Self {
        Rational::zero()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_literal(s: &str) -> Option<Self> {
        parse_rational(s)
    }
}

/// Exact parse of `p/q`, integers and decimals such as `-1.25e-3`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let num: BigInt = if all_digits.is_empty() { BigInt::zero() } else { all_digits.parse().ok()? };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Some(value)
}

/// Text form that [`Scalar::parse_literal`] reads back exactly.
pub fn format_scalar<S: Scalar>(v: &S) -> String {
    if S::EXACT {
        let r = v.to_rational();
        if r.denom().is_one() {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    } else {
        format!("{v}")
    }
}

/// `|a - b| <= tol * (1 + |b|)` in float mode, equality in exact mode.
pub fn approx_eq<S: Scalar>(a: &S, b: &S, rel_tol: f64) -> bool {
    if S::EXACT {
        a == b
    } else {
        let (a, b) = (a.to_f64(), b.to_f64());
        (a - b).abs() <= rel_tol * (1.0 + b.abs())
    }
}
