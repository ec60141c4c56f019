use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuinError {
    /// A named argument lies outside its admissible range.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("degenerate covariance: s = {s}, t = {t}, rho = {rho}")]
    DegenerateCovariance { s: f64, t: f64, rho: f64 },

    #[error("covariance matrix is not positive definite (det = {det})")]
    NotPositiveDefinite { det: f64 },

    #[error("{0} is undefined at these parameters")]
    Undefined(&'static str),

    #[error("regime {regime} does not apply to rho = {rho}, a = {a}")]
    RegimeMismatch { regime: String, rho: f64, a: f64 },

    #[error("regime FullDim_I needs a caller-supplied C1 constant")]
    MissingConstant,

    #[error("numeric failure in {op}: {detail}")]
    Numeric { op: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, RuinError>;

pub(crate) fn invalid<T>(name: &'static str, value: f64, reason: &'static str) -> Result<T> {
    Err(RuinError::InvalidParameter {
        name,
        value,
        reason,
    })
}
