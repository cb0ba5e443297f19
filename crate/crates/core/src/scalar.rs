//! Scalar abstractions.
//!
//! Two traits split the numeric code:
//!
//! * [`Real`] is the storage type of tensors, transforms and network
//!   parameters. It is implemented for `f32` and `f64`.
//! * [`Scalar`] is the minimal arithmetic needed to evaluate analytic
//!   fields (exact solutions, cutoffs, coefficients). Every `Real` is a
//!   `Scalar`, and so is [`Dual<S>`](crate::dual::Dual) for any scalar `S`,
//!   which is what lets one generic expression yield values, gradients and
//!   second derivatives.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use rustfft::FftNum;

/// Floating point storage type: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + FftNum + Debug + Display + Default + Sum + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("literal representable in the target float type")
}

/// Converts an index or count into `T`.
#[inline]
pub fn idx<T: Real>(v: usize) -> T {
    T::from_usize(v).expect("index representable in the target float type")
}

/// Arithmetic required by analytic field expressions.
pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Constant (zero derivative part).
    fn cst(v: f64) -> Self;
    /// Real part as `f64`, for branching on piecewise definitions.
    fn re(&self) -> f64;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tanh(self) -> Self;
    fn cosh(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn powi(self, n: i32) -> Self;

    fn sech(self) -> Self {
        Self::cst(1.0) / self.cosh()
    }
}

impl<T: Real> Scalar for T {
    #[inline]
    fn cst(v: f64) -> Self {
        lit(v)
    }
    #[inline]
    fn re(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    #[inline]
    fn sin(self) -> Self {
        Float::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        Float::cos(self)
    }
    #[inline]
    fn tanh(self) -> Self {
        Float::tanh(self)
    }
    #[inline]
    fn cosh(self) -> Self {
        Float::cosh(self)
    }
    #[inline]
    fn exp(self) -> Self {
        Float::exp(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        Float::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        Float::abs(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        Float::powi(self, n)
    }
}
