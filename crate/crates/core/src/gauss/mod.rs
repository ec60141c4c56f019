//! Scalar and bivariate Gaussian numerics and the covariance algebra of the
//! correlated pair `(W1(s), W2(t))`.

pub mod bivariate;
pub mod matrix;
pub mod normal;
pub mod quadform;

pub use bivariate::{biv_normal_log_pdf, biv_normal_pdf, biv_survival, biv_survival_std};
pub use matrix::{cov_matrix, CorrelatedPoint, Matrix2};
pub use normal::{
    mills_ratio, std_normal_cdf, std_normal_log_cdf, std_normal_log_pdf, std_normal_log_sf,
    std_normal_pdf, std_normal_sf,
};
pub use quadform::{b_vector, quadratic_form_q};
