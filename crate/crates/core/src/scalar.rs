//! Floating-point scalar abstraction shared by every numerical routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar the library is generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count into this scalar.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    /// Tolerance used when validating that probability vectors sum to one.
    ///
    /// `1e-12` for `f64`; widened to a few hundred ulps for narrower types.
    #[inline]
    fn stochastic_tol() -> Self {
        Self::of(1e-12).max(Self::epsilon() * Self::of(64.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
