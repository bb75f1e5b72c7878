//! Coefficient rings.
//!
//! Everything above this module is generic over a [`Coeff`]; the exact
//! checks in the engine are only meaningful for the rational instances.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

/// A field of coefficients.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// `Some(n/d)` when the value is rational with machine-sized parts.
    fn to_ratio(&self) -> Option<(i64, i64)>;
}

impl Coeff for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_ratio(&self) -> Option<(i64, i64)> {
        use num_traits::ToPrimitive;
        Some((self.numer().to_i64()?, self.denom().to_i64()?))
    }
}

impl Coeff for Rational64 {
    fn from_i64(v: i64) -> Self {
        Rational64::from_integer(v)
    }

    fn to_ratio(&self) -> Option<(i64, i64)> {
        Some((*self.numer(), *self.denom()))
    }
}

impl Coeff for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_ratio(&self) -> Option<(i64, i64)> {
        if self.fract() == 0.0 && self.abs() < 9.0e15 {
            Some((*self as i64, 1))
        } else {
            None
        }
    }
}

/// Sign factor `(-1)^e` as a coefficient.
pub fn sign<T: Coeff>(odd: bool) -> T {
    if odd {
        -T::one()
    } else {
        T::one()
    }
}
