//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = num_complex::Complex<T>;

/// Floating point scalar the library is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every literal used by the crate is representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits the scalar")
    }

    #[inline]
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer fits the scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `|re| + |im|`, the cheap magnitude used for deflation tests.
#[inline]
pub(crate) fn abs1<T: Real>(z: Cx<T>) -> T {
    z.re.abs() + z.im.abs()
}

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Cx::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Cx<T> {
    Cx::new(x, T::zero())
}

/// Imaginary unit.
#[inline]
pub(crate) fn i_unit<T: Real>() -> Cx<T> {
    Cx::new(T::zero(), T::one())
}
