use crate::error::Result;
use crate::gauss::matrix::cov_matrix;
use crate::scalar::Real;

/// `q_a(s,t) = (1, a) Σ_{s,t}⁻¹ (1, a)ᵀ`, written out in closed form.
pub fn quadratic_form_q<T: Real>(s: T, t: T, rho: T, a: T) -> Result<T> {
    let sigma = cov_matrix(s, t, rho)?;
    let m = sigma.m12;
    Ok((t - (a + a) * m + a * a * s) / sigma.det())
}

/// `b(s,t) = Σ_{s,t}⁻¹ (1, a)ᵀ`.
pub fn b_vector<T: Real>(s: T, t: T, rho: T, a: T) -> Result<(T, T)> {
    let sigma = cov_matrix(s, t, rho)?;
    let m = sigma.m12;
    let det = sigma.det();
    Ok(((t - a * m) / det, (a * s - m) / det))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_values() {
        for rho in [-0.9_f64, -0.5, 0.0, 0.4] {
            let q = quadratic_form_q(1.0_f64, 1.0, rho, 1.0).unwrap();
            assert!((q - 2.0 / (1.0 + rho)).abs() < 1e-14);
        }
        assert!((quadratic_form_q(1.0_f64, 1.0, -0.5, 1.0).unwrap() - 4.0).abs() < 1e-14);
        let q = quadratic_form_q(1.0_f64, 2.0 / 3.0, -0.5, 0.5).unwrap();
        assert!((q - 2.25).abs() < 1e-14);
    }

    #[test]
    fn b_at_unit_times() {
        let (rho, a) = (-0.3_f64, 0.7);
        let (b1, b2) = b_vector(1.0_f64, 1.0, rho, a).unwrap();
        let d = 1.0 - rho * rho;
        assert!((b1 - (1.0 - a * rho) / d).abs() < 1e-15);
        assert!((b2 - (a - rho) / d).abs() < 1e-15);
        let (_, b2) = b_vector(0.4_f64, 0.9, 0.6, 0.6).unwrap();
        assert!(b2.abs() < 1e-15);
    }
}
