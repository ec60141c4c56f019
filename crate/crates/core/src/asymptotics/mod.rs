//! Regime classification, the quadratic-form optimizer and the asymptotic
//! approximants of the joint ruin probability.

pub mod approx;
pub mod constants;
pub mod optimizer;
pub mod regime;

pub use approx::{
    approximant, approximant_with, full_dim_constants, ApproxOptions, AsymptoticApproximation,
    ConstantsForm, DensityTerm,
};
pub use constants::{
    big_M, gaussian_sum, gaussian_sum_limit, lemma33_integral, lemma33_limit, tau_constant,
    Lemma33Variant, SumVariant,
};
pub use optimizer::{lambdas, minimize_q, q_star_exponent, t_star, OptimizerResult};
pub use regime::{
    classify, classify_with, critical_rho, critical_rho_with, AaForm, Regime, DEFAULT_TOL,
};
