//! Numeric backends.
//!
//! Every evaluator in the crate is generic over [`Scalar`], which is
//! implemented for `f64` and for [`Rational`] (arbitrary precision). With
//! rational parameters the identities checked by the test suites hold
//! exactly; transcendental operations (`exp`, `sqrt` of non-squares,
//! fractional powers) are only available on the float backend and return
//! `None` on the rational one.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Num
    + std::ops::Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True for backends where arithmetic is exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn from_usize(v: usize) -> Self {
        Self::from_i64(v as i64)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Converts a float; the rational backend converts the binary value exactly.
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    fn sqrt(&self) -> Option<Self>;

    fn exp(&self) -> Option<Self>;

    fn ln(&self) -> Option<Self>;

    /// `self^e`; the rational backend only supports integer exponents.
    fn powf(&self, e: &Self) -> Option<Self>;

    fn powi(&self, e: i32) -> Self {
        let mut base = if e < 0 {
            Self::one() / self.clone()
        } else {
            self.clone()
        };
        let mut k = e.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            k >>= 1;
        }
        acc
    }

    /// Zero test: exact for rationals, `|x| <= tol` for floats.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Integer value if `self` is a non-negative integer.
    fn to_usize_exact(&self) -> Option<usize>;

    /// Parses `"a/b"`, an integer, or (float backend) a decimal literal.
    fn parse(s: &str) -> Result<Self>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        Some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }

    fn exp(&self) -> Option<Self> {
        Some(f64::exp(*self))
    }

    fn ln(&self) -> Option<Self> {
        (*self > 0.0).then(|| f64::ln(*self))
    }

    fn powf(&self, e: &Self) -> Option<Self> {
        Some(f64::powf(*self, *e))
    }

    fn is_negligible(&self, tol: f64) -> bool {
        f64::abs(*self) <= tol
    }

    fn to_usize_exact(&self) -> Option<usize> {
        (*self >= 0.0 && self.fract() == 0.0 && *self < 9.0e15).then_some(*self as usize)
    }

    fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| Error::parse(s))?;
            let d: f64 = d.trim().parse().map_err(|_| Error::parse(s))?;
            if d == 0.0 {
                return Err(Error::parse(s));
            }
            Ok(n / d)
        } else {
            s.parse().map_err(|_| Error::parse(s))
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Option<Self> {
        <BigRational as FromPrimitive>::from_f64(v)
    }

    fn to_f64(&self) -> f64 {
        // Scale down huge numerators/denominators to keep the quotient finite.
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => {
                let bits = self.numer().bits().max(self.denom().bits());
                let shift = bits.saturating_sub(1000) as usize;
                let n = (self.numer() >> shift).to_f64().unwrap_or(0.0);
                let d = (self.denom() >> shift).to_f64().unwrap_or(1.0);
                n / d
            }
        }
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        (&n * &n == *self.numer() && &d * &d == *self.denom()).then(|| Rational::new(n, d))
    }

    fn exp(&self) -> Option<Self> {
        self.is_zero().then(Rational::one)
    }

    fn ln(&self) -> Option<Self> {
        self.is_one().then(Rational::zero)
    }

    fn powf(&self, e: &Self) -> Option<Self> {
        if !e.is_integer() {
            return None;
        }
        let k = e.to_integer().to_i32()?;
        if k < 0 && self.is_zero() {
            return None;
        }
        Some(Scalar::powi(self, k))
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn to_usize_exact(&self) -> Option<usize> {
        (self.is_integer() && !self.is_negative())
            .then(|| self.to_integer().to_usize())
            .flatten()
    }

    fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(r) = Rational::from_str(s) {
            if !r.denom().is_zero() {
                return Ok(r);
            }
        }
        // Decimal literal such as "0.25": convert through its digit string.
        if let Some((int, frac)) = s.split_once('.') {
            let digits = format!("{int}{frac}");
            let num = BigInt::from_str(&digits).map_err(|_| Error::parse(s))?;
            let den = num_traits::pow(BigInt::from(10), frac.len());
            return Ok(Rational::new(num, den));
        }
        Err(Error::parse(s))
    }
}

/// Formats a scalar the way the JSON records expect: `"a/b"` strings for
/// rationals, plain numbers for floats.
pub fn to_json_value<T: Scalar>(v: &T) -> serde_json::Value {
    if T::EXACT {
        serde_json::Value::String(v.to_string())
    } else {
        serde_json::Number::from_f64(v.to_f64())
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
}

/// Inverse of [`to_json_value`]; accepts strings (`"1/3"`) and numbers.
pub fn from_json_value<T: Scalar>(v: &serde_json::Value) -> Result<T> {
    match v {
        serde_json::Value::String(s) => T::parse(s),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(T::from_i64(i))
            } else {
                let f = n.as_f64().ok_or_else(|| Error::parse(&n.to_string()))?;
                if T::EXACT {
                    T::parse(&n.to_string())
                } else {
                    T::from_f64(f).ok_or_else(|| Error::parse(&n.to_string()))
                }
            }
        }
        other => Err(Error::parse(&other.to_string())),
    }
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn max_abs<T: Scalar>(values: impl IntoIterator<Item = T>) -> f64 {
    values
        .into_iter()
        .map(|v| v.to_f64().abs())
        .fold(0.0, f64::max)
}

pub fn sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    values.into_iter().fold(T::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_literals() {
        assert_eq!(Rational::parse("1/3").unwrap(), rat(1, 3));
        assert_eq!(Rational::parse("0.25").unwrap(), rat(1, 4));
        assert_eq!(Rational::parse(" 7 ").unwrap(), rat(7, 1));
        assert!(Rational::parse("1/0").is_err());
        assert!((f64::parse("1/4").unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rational_sqrt_only_for_squares() {
        assert_eq!(Scalar::sqrt(&rat(4, 9)), Some(rat(2, 3)));
        assert_eq!(Scalar::sqrt(&rat(2, 1)), None);
    }

    #[test]
    fn powi_handles_negative_exponents() {
        assert_eq!(Scalar::powi(&rat(2, 3), -2), rat(9, 4));
        assert_eq!(Scalar::powi(&3.0f64, 3), 27.0);
    }

    #[test]
    fn json_round_trip() {
        let v = to_json_value(&rat(-5, 7));
        assert_eq!(from_json_value::<Rational>(&v).unwrap(), rat(-5, 7));
        let f = to_json_value(&0.5f64);
        assert_eq!(from_json_value::<f64>(&f).unwrap(), 0.5);
    }
}
