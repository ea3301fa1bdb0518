//! Scalar abstraction shared by every algebra in the crate.
//!
//! All numerical code is written against [`Real`], which is implemented for
//! `f32` and `f64`. The tolerances quoted throughout the documentation assume
//! `f64`; the `f32` instantiation is useful for the pure algebra but will not
//! meet the tighter residual bounds.

use core::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Never fails for the two implementors.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts an integer count.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// Lossy conversion used for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub(crate) fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// `𝑖`, the imaginary unit of the scalar field (not the quaternion `i`).
#[inline]
pub(crate) fn ci<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}
