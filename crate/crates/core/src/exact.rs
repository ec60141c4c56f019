//! Closed-form single-portfolio ruin, the independent-portfolio product and
//! the sandwich bounds for positively correlated portfolios.

use crate::error::{invalid, Result};
use crate::gauss::{biv_survival, cov_matrix, std_normal_cdf, std_normal_log_cdf, std_normal_sf};
use crate::scalar::Real;

/// How the second portfolio's initial capital is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SecondLevel<T> {
    /// An absolute level `v`.
    Absolute(T),
    /// A ratio `a` with `v = a u`.
    Ratio(T),
}

/// Parameters of the two-portfolio model
/// `(u + c1 s − W1(s), v + c2 t − W2(t))` on the horizon `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    pub rho: T,
    pub c1: T,
    pub c2: T,
    pub u: T,
    pub second: SecondLevel<T>,
    pub horizon: T,
}

impl<T: Real> ModelParams<T> {
    pub fn with_levels(rho: T, c1: T, c2: T, u: T, v: T) -> Self {
        Self {
            rho,
            c1,
            c2,
            u,
            second: SecondLevel::Absolute(v),
            horizon: T::one(),
        }
    }

    pub fn with_ratio(rho: T, c1: T, c2: T, u: T, a: T) -> Self {
        Self {
            rho,
            c1,
            c2,
            u,
            second: SecondLevel::Ratio(a),
            horizon: T::one(),
        }
    }

    pub fn horizon(mut self, horizon: T) -> Self {
        self.horizon = horizon;
        self
    }

    /// The same parameters with a different first-portfolio capital.
    pub fn at_u(mut self, u: T) -> Self {
        self.u = u;
        self
    }

    pub fn v(&self) -> T {
        match self.second {
            SecondLevel::Absolute(v) => v,
            SecondLevel::Ratio(a) => a * self.u,
        }
    }

    /// The ratio `a` if it was given, otherwise `v / u` when `u > 0`.
    pub fn a(&self) -> Option<T> {
        match self.second {
            SecondLevel::Ratio(a) => Some(a),
            SecondLevel::Absolute(v) if self.u > T::zero() => Some(v / self.u),
            SecondLevel::Absolute(_) => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho.abs() < T::one()) {
            return invalid("rho", self.rho.as_f64(), "must satisfy |rho| < 1");
        }
        for (name, x) in [("c1", self.c1), ("c2", self.c2), ("u", self.u)] {
            if !x.is_finite() {
                return invalid(name, x.as_f64(), "must be finite");
            }
        }
        if !(self.horizon > T::zero() && self.horizon.is_finite()) {
            return invalid("horizon", self.horizon.as_f64(), "must be positive");
        }
        match self.second {
            SecondLevel::Ratio(a) if !(a > T::zero() && a <= T::one()) => {
                invalid("a", a.as_f64(), "must lie in (0, 1]")
            }
            SecondLevel::Absolute(v) if !v.is_finite() => {
                invalid("v", v.as_f64(), "must be finite")
            }
            _ => Ok(()),
        }
    }

    /// Rescales to the unit horizon via Brownian self-similarity:
    /// capitals scale by `1/√T`, drifts by `√T`.
    pub fn normalized(&self) -> Self {
        let r = self.horizon.sqrt();
        Self {
            rho: self.rho,
            c1: self.c1 * r,
            c2: self.c2 * r,
            u: self.u / r,
            second: SecondLevel::Absolute(self.v() / r),
            horizon: T::one(),
        }
    }
}

/// `P{sup_{[0,T]} (B(t) − c t) > u}` for a standard Brownian motion `B`.
pub fn single_ruin<T: Real>(c: T, u: T, horizon: T) -> Result<T> {
    if c.is_nan() {
        return invalid("c", c.as_f64(), "must not be NaN");
    }
    if !(u >= T::zero()) {
        return invalid("u", u.as_f64(), "must be non-negative");
    }
    if !(horizon > T::zero()) {
        return invalid("horizon", horizon.as_f64(), "must be positive");
    }
    if u == T::infinity() {
        return Ok(T::zero());
    }
    let r = horizon.sqrt();
    let first = std_normal_cdf(-u / r - c * r);
    // e^{−2cu} Φ(−u/√T + c√T) in log space so that a huge exponential meets
    // a tiny probability without overflow.
    let log_second = -(c + c) * u + std_normal_log_cdf(-u / r + c * r);
    let p = first + log_second.exp();
    Ok(p.max(T::zero()).min(T::one()))
}

/// Ruin of both portfolios when they are independent, at the unit horizon.
pub fn independent_ruin<T: Real>(c1: T, c2: T, u: T, v: T) -> Result<T> {
    Ok(single_ruin(c1, u, T::one())? * single_ruin(c2, v, T::one())?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsResult<T> {
    pub lower: T,
    pub upper: T,
    pub amplification: T,
}

/// `A(c1, c2) = 1 / (Ψ(max(0, (c2 − ρ c1)/√(1 − ρ²))) Ψ(max(0, c1)))`.
pub fn amplification<T: Real>(rho: T, c1: T, c2: T) -> T {
    let x = ((c2 - rho * c1) / (T::one() - rho * rho).sqrt()).max(T::zero());
    let y = c1.max(T::zero());
    (std_normal_sf(x) * std_normal_sf(y)).recip()
}

/// Lower and upper bounds on the joint ruin probability for `ρ ∈ (0, 1)`.
///
/// The lower bound is `P{W1(1) > u + c1, W2(1) > v + c2}`, ruin observed at
/// the horizon. The upper bound multiplies it by [`amplification`] and is
/// capped at one. Non-unit horizons are mapped to `T = 1` first.
pub fn ruin_bounds<T: Real>(params: &ModelParams<T>) -> Result<BoundsResult<T>> {
    params.validate()?;
    let p = params.normalized();
    if !(p.rho > T::zero() && p.rho < T::one()) {
        return invalid("rho", p.rho.as_f64(), "bounds require rho in (0, 1)");
    }
    let v = p.v();
    if !(p.u >= T::zero()) {
        return invalid("u", p.u.as_f64(), "must be non-negative");
    }
    if !(v >= T::zero()) {
        return invalid("v", v.as_f64(), "must be non-negative");
    }
    let sigma = cov_matrix(T::one(), T::one(), p.rho)?;
    let lower = biv_survival(p.u + p.c1, v + p.c2, &sigma)?;
    let amp = amplification(p.rho, p.c1, p.c2);
    Ok(BoundsResult {
        lower,
        upper: (amp * lower).min(T::one()),
        amplification: amp,
    })
}
