//! Scalar abstraction: every kernel is generic over `Real` (f32 or f64).

use nalgebra::RealField;
use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable by all kernels: f32 or f64.
pub trait Real: RealField + Float + FromPrimitive + Copy {}

impl Real for f32 {}
impl Real for f64 {}

/// Lift an f64 constant (tolerance, coefficient) into the scalar type.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant must be representable in the scalar type")
}
