//! Scalar abstraction shared by the simulator and the ML core.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use ndarray::ScalarOperand;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point type the crate is generic over.
///
/// Implemented for `f32` and `f64`. Tolerances used by validation code come
/// from the type so that single precision does not trip double-precision
/// checks.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + ScalarOperand
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance for "is this state normalized" style checks.
    fn norm_tolerance() -> Self;

    /// Digits after the point in `{:.N$e}` needed for a lossless decimal round trip.
    const ROUND_TRIP_DIGITS: usize;

    /// Converts an `f64` literal; every value representable in `f64` maps to
    /// the nearest value of `Self`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal converts to every Real")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize converts to every Real")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl Real for f64 {
    fn norm_tolerance() -> Self {
        1e-9
    }
    const ROUND_TRIP_DIGITS: usize = 16;
}

impl Real for f32 {
    fn norm_tolerance() -> Self {
        1e-5
    }
    const ROUND_TRIP_DIGITS: usize = 8;
}

/// Formats a value with enough significant digits to parse back bit-identically
/// (17 significant digits for `f64`).
pub fn fmt_exact<T: Real>(v: T) -> String {
    format!("{:.*e}", T::ROUND_TRIP_DIGITS, v)
}
