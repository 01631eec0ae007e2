//! Scalar abstraction: everything numeric in this crate is generic over a
//! floating-point type implementing [`Real`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar: f32 or f64.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Shorthand for embedding an `f64` constant into the scalar type.
#[inline]
pub fn cst<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("constant not representable in scalar type")
}
