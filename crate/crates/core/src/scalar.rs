//! Floating-point scalar abstraction shared by every numerical routine.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

pub use rustfft::num_complex::Complex;

/// Real scalar usable by the spectral machinery: `f32` or `f64`.
pub trait Real:
    FftNum + Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Default + Display + LowerExp + Debug
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn from_isize_lossy(n: isize) -> Self {
        Self::from_isize(n).expect("isize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Wrap `x` into `[0, 2π)`.
#[inline]
pub fn wrap_two_pi<T: Real>(x: T) -> T {
    let tau = T::two_pi();
    let mut r = x - tau * (x / tau).floor();
    if r >= tau {
        r -= tau;
    }
    if r < T::zero() {
        r = T::zero();
    }
    r
}
