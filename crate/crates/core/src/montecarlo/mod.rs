//! Simulation of the correlated pair: crude and importance-sampled ruin
//! estimators and the Pickands-type constant of the order-`u⁻²` regime.

pub mod bridge;
pub mod drift;
pub mod estimate;
pub mod importance;
pub mod path;
pub mod pickands;
pub mod pool;
pub mod rng;
pub mod ruin;

pub use drift::DriftSchedule;
pub use estimate::{Accumulator, MCEstimate};
pub use importance::{
    auto_tilt, mc_likelihood_ratio_mean, mc_ruin_importance, user_tilt, TiltComponent,
};
pub use path::{sample_path, PathGrid};
pub use pickands::{estimate_pickands_c1, pickands_profile};
pub use pool::{thread_count, THREADS_ENV};
pub use ruin::{mc_ruin, mc_ruin_levels, resolution_study, MCConfig, ResolutionStudy};
