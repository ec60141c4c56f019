use crate::error::{invalid, Result, RuinError};
use crate::gauss::{b_vector, quadratic_form_q};
use crate::scalar::Real;

/// `t* = a / (ρ (2aρ − 1))`.
pub fn t_star<T: Real>(rho: T, a: T) -> Result<T> {
    let den = rho * ((a + a) * rho - T::one());
    if den == T::zero() || !den.is_finite() {
        return Err(RuinError::Undefined("t* (zero denominator)"));
    }
    Ok(a / den)
}

/// `(λ1, λ2) = Σ_{1,1}⁻¹ (1, a)ᵀ`.
pub fn lambdas<T: Real>(rho: T, a: T) -> Result<(T, T)> {
    b_vector(T::one(), T::one(), rho, a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerResult<T> {
    /// Minimizing `(s, t)` pairs; two of them only in the symmetric case.
    pub points: Vec<(T, T)>,
    pub q_min: T,
}

pub(crate) fn check_full_dimensional<T: Real>(rho: T, a: T) -> Result<()> {
    if !(rho.abs() < T::one()) {
        return invalid("rho", rho.as_f64(), "must satisfy |rho| < 1");
    }
    if !(a > rho.max(T::zero()) && a <= T::one()) {
        return invalid("a", a.as_f64(), "must lie in (max(0, rho), 1]");
    }
    Ok(())
}

/// Minimizer of `q_a` over `[0,1]²` for `a ∈ (max(0,ρ), 1]`.
pub fn minimize_q<T: Real>(rho: T, a: T) -> Result<OptimizerResult<T>> {
    check_full_dimensional(rho, a)?;
    let interior = t_star(rho, a)
        .ok()
        .filter(|&t| t > T::zero() && t <= T::one());
    let points = match interior {
        Some(t) if a == T::one() && rho < -T::lit(0.5) => vec![(T::one(), t), (t, T::one())],
        Some(t) => vec![(T::one(), t)],
        None => vec![(T::one(), T::one())],
    };
    let (s, t) = points[0];
    let q_min = quadratic_form_q(s, t, rho, a)?;
    Ok(OptimizerResult { points, q_min })
}

/// `q*_a / 2`, the rate in `log π ~ −u² q*_a / 2`.
pub fn q_star_exponent<T: Real>(rho: T, a: T) -> Result<T> {
    Ok(minimize_q(rho, a)?.q_min / T::lit(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_star_examples() {
        assert!((t_star(-1.0_f64 + 0.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((t_star(-0.5_f64, 0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(t_star(0.0_f64, 0.5).is_err());
        assert!(t_star(0.5_f64, 1.0).is_err());
    }

    #[test]
    fn lambda_examples() {
        let (l1, l2) = lambdas(0.0_f64, 0.7).unwrap();
        assert!((l1 - 1.0).abs() < 1e-15 && (l2 - 0.7).abs() < 1e-15);
        let (l1, l2) = lambdas(-0.5_f64, 1.0).unwrap();
        assert!((l1 - 2.0).abs() < 1e-15 && (l2 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn optimizer_examples() {
        let r = minimize_q(0.3_f64, 0.9).unwrap();
        assert_eq!(r.points, vec![(1.0, 1.0)]);
        let r = minimize_q(-0.8_f64, 1.0).unwrap();
        assert_eq!(r.points.len(), 2);
        let t = 1.0 / (0.8 * 2.6);
        assert!((r.points[0].1 - t).abs() < 1e-15 && (r.points[1].0 - t).abs() < 1e-15);
        assert!(minimize_q(0.6_f64, 0.5).is_err());
    }

    #[test]
    fn exponent_examples() {
        assert!((q_star_exponent(0.0_f64, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((q_star_exponent(-0.5_f64, 0.5).unwrap() - 1.125).abs() < 1e-14);
    }
}
