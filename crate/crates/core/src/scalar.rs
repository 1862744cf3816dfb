//! Numeric backends for masses and distances.
//!
//! Every measure-carrying type is generic over [`Scalar`]. [`Rational`] gives
//! exact arithmetic (used for axiom and round-trip checks), `f64` is the fast
//! fallback used by Monte Carlo code.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary precision rational number.
pub type Rational = BigRational;

/// Absolute tolerance used when comparing floating point masses.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse `{0}` as a number")]
pub struct ScalarParseError(pub String);

pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync + 'static {
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Text form used in JSON files: `p/q` for rationals, 17 significant digits for floats.
    fn to_text(&self) -> String;
    fn parse_text(text: &str) -> Result<Self, ScalarParseError>;
    /// Equality test: exact for rationals, within [`FLOAT_TOLERANCE`] for floats.
    fn close_to(&self, other: &Self) -> bool;
    /// Whether this backend computes exactly.
    fn is_exact() -> bool;

    fn from_usize(k: usize) -> Self {
        Self::from_ratio(k as i64, 1)
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    fn abs_diff(&self, other: &Self) -> Self {
        if self > other {
            self.clone() - other.clone()
        } else {
            other.clone() - self.clone()
        }
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_text(&self) -> String {
        format!("{:.16e}", self)
    }

    fn parse_text(text: &str) -> Result<Self, ScalarParseError> {
        let t = text.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p = f64::from_str(p.trim()).map_err(|_| ScalarParseError(text.to_string()))?;
            let q = f64::from_str(q.trim()).map_err(|_| ScalarParseError(text.to_string()))?;
            if q == 0.0 {
                return Err(ScalarParseError(text.to_string()));
            }
            return Ok(p / q);
        }
        f64::from_str(t).map_err(|_| ScalarParseError(text.to_string()))
    }

    fn close_to(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_TOLERANCE
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for Rational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_text(&self) -> String {
        if self.denom().is_one() {
            format!("{}/1", self.numer())
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    /// Accepts `p/q`, integers and finite decimals with an optional
    /// exponent (`0.125` and `1.25e-1` parse to `1/8`).
    fn parse_text(text: &str) -> Result<Self, ScalarParseError> {
        let err = || ScalarParseError(text.to_string());
        let t = text.trim();
        if let Some((mantissa, exp)) = t.split_once(['e', 'E']) {
            if mantissa.contains('/') {
                return Err(err());
            }
            let m = Self::parse_text(mantissa).map_err(|_| err())?;
            let e: i32 = exp.parse().map_err(|_| err())?;
            if e.unsigned_abs() > 4096 {
                return Err(err());
            }
            let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize));
            return Ok(if e >= 0 { m * scale } else { m / scale });
        }
        if let Some((p, q)) = t.split_once('/') {
            let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            return Ok(BigRational::new(p, q));
        }
        if let Some((int, frac)) = t.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let negative = int.starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac);
            let mut numer = BigInt::from_str(&digits).map_err(|_| err())?;
            if negative {
                numer = -numer;
            }
            let denom = num_traits::pow(BigInt::from(10), frac.len());
            return Ok(BigRational::new(numer, denom));
        }
        BigInt::from_str(t).map(BigRational::from_integer).map_err(|_| err())
    }

    fn close_to(&self, other: &Self) -> bool {
        self == other
    }

    fn is_exact() -> bool {
        true
    }

    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }
}

/// Sum of an iterator of scalars.
pub fn sum<'a, S: Scalar, I: IntoIterator<Item = &'a S>>(items: I) -> S {
    items.into_iter().fold(S::zero(), |acc, x| acc + x.clone())
}

#[cfg(test)]
pub(crate) fn ratio(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}
