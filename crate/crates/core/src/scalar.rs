//! Floating-point abstraction for the numerical core.
//!
//! All physics modules are generic over [`Scalar`] so the same code runs in
//! `f32` or `f64`. Concrete aliases for the common `f64` instantiation live
//! at the crate root.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, NumAssign};

/// Real scalar type usable throughout the simulation core.
pub trait Scalar:
    Float + FloatConst + NumAssign + Sum<Self> + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; used to inject physical constants.
    fn of(x: f64) -> Self;

    /// Widening conversion back to `f64` for reporting and serialization.
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}
