//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// All physics and fitting code is written against this trait. Absolute
/// tolerances are quoted for `f64` and rescaled for narrower types with
/// [`tol`].
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Rescales an absolute `f64` tolerance to the precision of `T`.
///
/// For `f64` this is the identity; for `f32` the tolerance grows by the
/// ratio of machine epsilons.
#[inline]
pub fn tol<T: Real>(f64_tolerance: f64) -> T {
    let ratio = T::epsilon().to_f64().unwrap_or(f64::EPSILON) / f64::EPSILON;
    lit(f64_tolerance * ratio)
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> Cplx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Cplx<T> {
    Complex::new(x, T::zero())
}

/// 2π in the scalar type.
#[inline]
pub fn two_pi<T: Real>() -> T {
    T::TAU()
}

/// Ordinary frequency in MHz to angular rate in rad/µs.
#[inline]
pub fn mhz_to_angular<T: Real>(mhz: T) -> T {
    two_pi::<T>() * mhz
}

/// Angular rate in rad/µs to ordinary frequency in MHz.
#[inline]
pub fn angular_to_mhz<T: Real>(omega: T) -> T {
    omega / two_pi::<T>()
}
