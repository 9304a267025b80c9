//! Floating-point scalar abstraction for the simulation core.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar type the whole simulation core is generic over.
///
/// `f64` is the reference precision: all contract tolerances below are quoted
/// for it. `f32` is supported with correspondingly relaxed tolerances.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Sum + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Tolerance for checks that are exact up to rounding (normalization,
    /// hermiticity of constructed operators, closed-form algebra).
    fn tol_exact() -> Self;

    /// Tolerance for accumulated numerics (linear solves, propagation).
    fn tol_solver() -> Self;

    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 value representable in scalar type")
    }

    fn to64(self) -> f64 {
        self.to_f64().expect("scalar value representable as f64")
    }
}

impl Scalar for f64 {
    fn tol_exact() -> Self {
        1e-12
    }
    fn tol_solver() -> Self {
        1e-10
    }
}

impl Scalar for f32 {
    fn tol_exact() -> Self {
        1e-5
    }
    fn tol_solver() -> Self {
        1e-4
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_through_f64() {
        assert_eq!(f64::of(2.5), 2.5);
        assert_eq!(f32::of(2.5), 2.5f32);
        assert_eq!(0.25f32.to64(), 0.25);
    }
}
