//! Numeric traits the metric code is generic over.
//!
//! Counting metrics (consistency, collision degree, error rate, weighted WER,
//! average correlation) only need field arithmetic, so they accept any
//! [`Scalar`], including exact rationals such as `Ratio<i64>`. Entropy needs a
//! logarithm and therefore requires [`RealScalar`].

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num};

/// Field-like scalar: `f32`, `f64`, `Ratio<i64>`, `BigRational`, ...
pub trait Scalar: Num + Clone + PartialOrd + FromPrimitive + Debug {
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// `num / den` for two counts.
    fn ratio(num: usize, den: usize) -> Self {
        Self::from_count(num) / Self::from_count(den)
    }

    /// Lossy conversion from a configuration value (weights, alpha).
    fn from_real(x: f64) -> Self {
        Self::from_f64(x).expect("real representable in scalar type")
    }
}

impl<T> Scalar for T where T: Num + Clone + PartialOrd + FromPrimitive + Debug {}

/// Floating-point scalar with transcendental functions.
pub trait RealScalar: Scalar + Float {}

impl<T> RealScalar for T where T: Scalar + Float {}

/// True when `x` lies in the closed unit interval.
pub fn in_unit_interval<T: Scalar>(x: &T) -> bool {
    *x >= T::zero() && *x <= T::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn ratio_is_exact_for_rationals() {
        let r: Ratio<i64> = Scalar::ratio(1, 3);
        assert_eq!(r, Ratio::new(1, 3));
        let f: f64 = Scalar::ratio(1, 4);
        assert_eq!(f, 0.25);
    }

    #[test]
    fn unit_interval() {
        assert!(in_unit_interval(&0.0f64));
        assert!(in_unit_interval(&Ratio::new(1i64, 2)));
        assert!(!in_unit_interval(&1.5f32));
    }
}
