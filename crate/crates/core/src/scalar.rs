//! Field-like scalars the algebra is generic over.
//!
//! `f64` is the working type of the lattice code; [`Rational`] gives exact
//! arithmetic for the algebraic identities.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
    + 'static
{
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Exact conversion of a finite float (every finite `f64` is a dyadic
    /// rational).
    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    fn is_finite(&self) -> bool;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// `m!` as a scalar.
pub fn factorial<S: Scalar>(m: usize) -> S {
    let mut acc = S::one();
    for i in 2..=m {
        acc = acc * S::from_i64(i as i64);
    }
    acc
}

/// Integer power by repeated multiplication; `pow(x, 0) = 1`.
pub fn powi<S: Scalar>(x: &S, k: usize) -> S {
    let mut acc = S::one();
    for _ in 0..k {
        acc = acc * x.clone();
    }
    acc
}
