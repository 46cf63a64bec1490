//! Floating-point scalar abstraction: f32 or f64.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Scalar type all numerical routines are generic over.
///
/// Implemented for `f32` and `f64`; every algorithm in this crate is written
/// against this trait and instantiated through the aliases at the crate root.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Display + Debug + Send + Sync + 'static
{
    /// Lossy cast from `f64`, for literals and tolerances.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    /// Cast from a count.
    fn from_count(v: usize) -> Self {
        Self::from_usize(v).expect("count representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
