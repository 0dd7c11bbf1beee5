//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All math is written against [`Real`], which is implemented for `f32` and
//! `f64`. The concrete `f64` aliases at the crate root are what the CLI uses.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar usable by the solver, the simulator and the FFT layer.
pub trait Real:
    RealField + FftNum + Copy + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite literal")
    }

    /// Converts a count or index into `Self`.
    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("representable count")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Machine epsilon of the type.
    fn eps() -> Self;

    /// Smallest positive normal value.
    fn tiny() -> Self;
}

impl Real for f32 {
    fn eps() -> Self {
        f32::EPSILON
    }

    fn tiny() -> Self {
        f32::MIN_POSITIVE
    }
}

impl Real for f64 {
    fn eps() -> Self {
        f64::EPSILON
    }

    fn tiny() -> Self {
        f64::MIN_POSITIVE
    }
}

/// `|z|` without overflow.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

/// `arg z` in `[-pi, pi]`.
#[inline]
pub fn carg<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}

/// Largest of two values.
#[inline]
pub(crate) fn max<T: Real>(a: T, b: T) -> T {
    if a > b {
        a
    } else {
        b
    }
}

/// Smallest of two values.
#[inline]
pub(crate) fn min<T: Real>(a: T, b: T) -> T {
    if a < b {
        a
    } else {
        b
    }
}
