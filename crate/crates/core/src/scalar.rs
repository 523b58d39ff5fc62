//! Scalar abstraction so the numeric core works with either `f32` or `f64`.
//!
//! Training, reports and the CLI default to `f64` (see the aliases at the
//! crate root); the gradient checks are only meaningful at 64-bit precision.

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar for features, losses, weights and model parameters.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + LinalgScalar
    + ScalarOperand
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// One draw from the standard normal distribution.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from the symmetric uniform distribution on `[-bound, bound)`.
    fn uniform_sym<R: Rng + ?Sized>(rng: &mut R, bound: Self) -> Self;
}

impl Scalar for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn uniform_sym<R: Rng + ?Sized>(rng: &mut R, bound: Self) -> Self {
        rng.random_range(-bound..bound)
    }
}

impl Scalar for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn uniform_sym<R: Rng + ?Sized>(rng: &mut R, bound: Self) -> Self {
        rng.random_range(-bound..bound)
    }
}
