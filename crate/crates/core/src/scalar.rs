use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, ToPrimitive};

use crate::Rational;

/// Numeric type the model is evaluated in.
///
/// Only ring operations and ordering are required by the dynamics; the
/// conversions exist for counts (degrees) and for reporting.
pub trait Scalar:
    Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Slack allowed when checking that a set of shares sums to at most one.
    fn share_tolerance() -> Self;

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_unit_interval(self) -> bool {
        self >= Self::zero() && self <= Self::one()
    }
}

impl Scalar for f64 {
    fn share_tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    // 1e-9 is below f32 resolution near one.
    fn share_tolerance() -> Self {
        1e-6
    }
}

impl Scalar for Rational {
    fn share_tolerance() -> Self {
        Rational::from_integer(0)
    }
}
