//! Scalar abstraction for the model math.
//!
//! The power model, breakeven algebra, fleet-impact arithmetic and the
//! statistics kernels are generic over [`Real`] so they run at `f32` or
//! `f64`. Every public type defaults its scalar parameter to `f64`, which
//! is what the simulator, the trace formats and the CLI use.

use std::fmt::{Debug, Display};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into the working scalar.
///
/// Panics only if the constant is not representable, which cannot happen
/// for the finite literals used in this crate.
pub(crate) fn cast<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("finite constant representable in scalar type")
}
