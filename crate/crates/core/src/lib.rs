//! Finite-time ruin probabilities for two correlated Brownian risk portfolios.
//!
//! The analytic modules are generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

// Guards are written `!(x > 0)` so that NaN is rejected with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod exact;
pub mod gauss;
pub mod montecarlo;
pub mod quad;
pub mod scalar;
pub mod verify;

pub use error::{Result, RuinError};
pub use scalar::Real;

pub type Matrix2F = gauss::Matrix2<f64>;
pub type ModelParamsF = exact::ModelParams<f64>;
pub type BoundsResultF = exact::BoundsResult<f64>;
pub type OptimizerResultF = asymptotics::OptimizerResult<f64>;
pub type ApproxOptionsF = asymptotics::ApproxOptions<f64>;
pub type AsymptoticApproximationF = asymptotics::AsymptoticApproximation<f64>;
