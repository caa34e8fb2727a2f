//! Floating-point abstraction shared by every numerical module.

use std::fmt;

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// A real scalar the solver can run on: `f32` or `f64`.
///
/// Storage and small linear algebra go through nalgebra, so the bound is
/// `RealField`; num-traits supplies the conversions to and from `f64`
/// literals. The dense factorizations run on faer through [`Scalar::Dense`].
pub trait Scalar:
    RealField + Copy + FromPrimitive + ToPrimitive + fmt::LowerExp + Send + Sync + 'static
{
    /// The same type seen through faer's scalar traits.
    type Dense: faer::traits::RealField + Copy;

    fn to_dense(self) -> Self::Dense;

    fn from_dense(value: Self::Dense) -> Self;

    /// Converts an `f64` literal, rounding to the nearest representable value.
    fn lit(value: f64) -> Self;

    fn as_f64(self) -> f64;

    /// Machine epsilon of the concrete type.
    fn machine_eps() -> Self;
}

impl Scalar for f32 {
    type Dense = f32;

    #[inline]
    fn to_dense(self) -> Self {
        self
    }

    #[inline]
    fn from_dense(value: Self) -> Self {
        value
    }

    #[inline]
    fn lit(value: f64) -> Self {
        value as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        f64::from(self)
    }

    fn machine_eps() -> Self {
        f32::EPSILON
    }
}

impl Scalar for f64 {
    type Dense = f64;

    #[inline]
    fn to_dense(self) -> Self {
        self
    }

    #[inline]
    fn from_dense(value: Self) -> Self {
        value
    }

    #[inline]
    fn lit(value: f64) -> Self {
        value
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }

    fn machine_eps() -> Self {
        f64::EPSILON
    }
}

/// Converts a slice of scalars to `f64`, used for error payloads.
pub(crate) fn to_f64_vec<T: Scalar>(values: &[T]) -> Vec<f64> {
    values.iter().map(|v| v.as_f64()).collect()
}
