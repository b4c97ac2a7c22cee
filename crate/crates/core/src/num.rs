//! Scalar abstraction shared by the frequency and statistics code.
//!
//! Counting code produces ratios of non-negative integers. Anything that can
//! represent those ratios (binary floats, exact rationals) implements
//! [`Scalar`], so the same code paths run in `f64` for production and in
//! [`num_rational::Rational64`] when tests need exact arithmetic.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Float, Num};

/// A number type that ratios of counts can be expressed in.
pub trait Scalar: Num + Copy + PartialOrd + Debug {
    /// Converts an integer count into the scalar type.
    fn from_count(count: u64) -> Self;

    /// `numerator / denominator`; `denominator` must be non-zero.
    fn ratio(numerator: u64, denominator: u64) -> Self {
        Self::from_count(numerator) / Self::from_count(denominator)
    }

    /// Lossy conversion used for reporting.
    fn to_f64(self) -> f64;

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_count(count: u64) -> Self {
        count as f64
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    #[inline]
    fn from_count(count: u64) -> Self {
        count as f32
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for Ratio<i64> {
    fn from_count(count: u64) -> Self {
        Ratio::from_integer(i64::try_from(count).expect("count exceeds i64 range"))
    }

    fn ratio(numerator: u64, denominator: u64) -> Self {
        let n = i64::try_from(numerator).expect("count exceeds i64 range");
        let d = i64::try_from(denominator).expect("count exceeds i64 range");
        Ratio::new(n, d)
    }

    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

impl Scalar for Ratio<i128> {
    fn from_count(count: u64) -> Self {
        Ratio::from_integer(count as i128)
    }

    fn ratio(numerator: u64, denominator: u64) -> Self {
        Ratio::new(numerator as i128, denominator as i128)
    }

    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// Floating-point scalars, needed wherever a transcendental function enters
/// (p-values).
pub trait RealScalar: Scalar + Float {}

impl<T: Scalar + Float> RealScalar for T {}
