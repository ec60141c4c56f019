use crate::error::Result;
use crate::gauss::matrix::Matrix2;
use crate::gauss::normal::{std_normal_log_pdf, std_normal_pdf, std_normal_sf};
use crate::quad::{integrate, QuadSettings};
use crate::scalar::Real;

/// Log of the centered bivariate normal density with covariance `sigma`.
pub fn biv_normal_log_pdf<T: Real>(x: T, y: T, sigma: &Matrix2<T>) -> Result<T> {
    sigma.check_positive_definite()?;
    let det = sigma.det();
    let inv = sigma.inverse()?;
    let two_pi = T::PI() + T::PI();
    Ok(-T::lit(0.5) * inv.quad_form(x, y) - two_pi.ln() - T::lit(0.5) * det.ln())
}

/// Centered bivariate normal density with covariance `sigma`.
pub fn biv_normal_pdf<T: Real>(x: T, y: T, sigma: &Matrix2<T>) -> Result<T> {
    biv_normal_log_pdf(x, y, sigma).map(T::exp)
}

/// `P{X > u, Y > v}` for centered `(X, Y)` with covariance `sigma`.
///
/// Conditioning on `X` leaves a single integral
/// `∫_h^∞ φ(z) Ψ((k − r z)/√(1 − r²)) dz` over standardized thresholds, which
/// is evaluated adaptively with a relative tolerance so that deep-tail values
/// keep their significant digits.
pub fn biv_survival<T: Real>(u: T, v: T, sigma: &Matrix2<T>) -> Result<T> {
    sigma.check_positive_definite()?;
    let h = u / sigma.m11.sqrt();
    let k = v / sigma.m22.sqrt();
    biv_survival_std(h, k, sigma.correlation())
}

/// Standardized form: unit variances and correlation `r`, `|r| < 1`.
pub fn biv_survival_std<T: Real>(h: T, k: T, r: T) -> Result<T> {
    if r == T::zero() {
        return Ok(std_normal_sf(h) * std_normal_sf(k));
    }
    // Integrate over the coordinate with the larger threshold; its density
    // then carries most of the decay.
    let (h, k) = if k > h { (k, h) } else { (h, k) };
    let far = T::lit(40.0);
    let lo = h.max(-far);
    if lo >= far {
        return Ok(T::zero());
    }
    let sr = (T::one() - r * r).sqrt();
    let integrand = |z: T| std_normal_pdf(z) * std_normal_sf((k - r * z) / sr);

    let peak = lo.max(r * k).max(T::zero());
    let hi = peak + T::lit(12.0);
    let mut cuts = vec![lo, hi];
    for c in [peak, k / r] {
        if c > lo && c < hi {
            cuts.push(c);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let settings = QuadSettings {
        abs_tol: T::min_positive_value(),
        rel_tol: T::lit(1e-12).max(T::epsilon() * T::lit(64.0)),
        max_intervals: 2000,
    };
    let mut total = T::zero();
    for w in cuts.windows(2) {
        total = total + integrate(integrand, w[0], w[1], settings)?.value;
    }
    Ok(total.max(T::zero()).min(T::one()))
}

/// Log density of a bivariate normal at a point, used by the approximants
/// where the density itself underflows.
pub fn std_pair_log_pdf<T: Real>(x: T, y: T) -> T {
    std_normal_log_pdf(x) + std_normal_log_pdf(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::matrix::cov_matrix;

    #[test]
    fn orthant_identity() {
        let m = Matrix2::new(1.0_f64, 0.5, 1.0);
        let p = biv_survival(0.0_f64, 0.0, &m).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-13);
        for r in [-0.95_f64, -0.3, 0.2, 0.8, 0.99] {
            let p = biv_survival_std(0.0_f64, 0.0, r).unwrap();
            let exact = 0.25 + f64::asin(r) / (2.0 * std::f64::consts::PI);
            assert!((p - exact).abs() < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn density_examples() {
        let id = Matrix2::<f64>::identity();
        let d = biv_normal_pdf(0.3_f64, -1.2, &id).unwrap();
        assert!((d - std_normal_pdf(0.3) * std_normal_pdf(-1.2)).abs() < 1e-16);
        let m = cov_matrix(0.6_f64, 1.0, -0.4).unwrap();
        let d0 = biv_normal_pdf(0.0_f64, 0.0, &m).unwrap();
        assert!((d0 - 1.0 / (2.0 * std::f64::consts::PI * m.det().sqrt())).abs() < 1e-15);
        let m = cov_matrix(1.0_f64, 1.0, 0.3).unwrap();
        let a = biv_normal_pdf(0.4_f64, 1.1, &m).unwrap();
        let b = biv_normal_pdf(1.1_f64, 0.4, &m).unwrap();
        assert!((a - b).abs() < 1e-16);
    }

    #[test]
    fn rejects_indefinite_matrix() {
        let m = Matrix2::new(1.0_f64, 2.0, 1.0);
        assert!(biv_survival(0.0_f64, 0.0, &m).is_err());
        assert!(biv_normal_pdf(0.0_f64, 0.0, &m).is_err());
    }

    #[test]
    fn symmetric_in_arguments() {
        let a = biv_survival_std(1.3_f64, -0.4, 0.6).unwrap();
        let b = biv_survival_std(-0.4_f64, 1.3, 0.6).unwrap();
        assert!((a - b).abs() < 1e-14);
    }
}
