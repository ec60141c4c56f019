use crate::error::{Result, RuinError};
use crate::scalar::Real;

/// Symmetric 2x2 matrix stored by its upper triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2<T> {
    pub m11: T,
    pub m12: T,
    pub m22: T,
}

impl<T: Real> Matrix2<T> {
    pub fn new(m11: T, m12: T, m22: T) -> Self {
        Self { m11, m12, m22 }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::one())
    }

    #[inline]
    pub fn det(&self) -> T {
        self.m11 * self.m22 - self.m12 * self.m12
    }

    pub fn is_positive_definite(&self) -> bool {
        self.m11 > T::zero() && self.m22 > T::zero() && self.det() > T::zero()
    }

    /// Errors unless the matrix is positive definite.
    pub fn check_positive_definite(&self) -> Result<()> {
        if self.is_positive_definite() {
            Ok(())
        } else {
            Err(RuinError::NotPositiveDefinite {
                det: self.det().as_f64(),
            })
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det == T::zero() || !det.is_finite() {
            return Err(RuinError::NotPositiveDefinite { det: det.as_f64() });
        }
        Ok(Self::new(self.m22 / det, -self.m12 / det, self.m11 / det))
    }

    #[inline]
    pub fn mul_vec(&self, x: T, y: T) -> (T, T) {
        (self.m11 * x + self.m12 * y, self.m12 * x + self.m22 * y)
    }

    /// `(x, y) M (x, y)ᵀ`.
    #[inline]
    pub fn quad_form(&self, x: T, y: T) -> T {
        self.m11 * x * x + (self.m12 + self.m12) * x * y + self.m22 * y * y
    }

    /// `(x1, y1) M (x2, y2)ᵀ`.
    #[inline]
    pub fn bilinear(&self, x1: T, y1: T, x2: T, y2: T) -> T {
        let (a, b) = self.mul_vec(x2, y2);
        x1 * a + y1 * b
    }

    pub fn eigenvalues(&self) -> (T, T) {
        let half = T::lit(0.5);
        let mean = half * (self.m11 + self.m22);
        let diff = half * (self.m11 - self.m22);
        let rad = (diff * diff + self.m12 * self.m12).sqrt();
        (mean - rad, mean + rad)
    }

    /// Correlation coefficient implied by the matrix.
    pub fn correlation(&self) -> T {
        self.m12 / (self.m11 * self.m22).sqrt()
    }
}

/// The arguments of a covariance matrix `Σ_{s,t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedPoint<T> {
    pub s: T,
    pub t: T,
    pub rho: T,
}

impl<T: Real> CorrelatedPoint<T> {
    pub fn new(s: T, t: T, rho: T) -> Self {
        Self { s, t, rho }
    }

    pub fn covariance(&self) -> Result<Matrix2<T>> {
        cov_matrix(self.s, self.t, self.rho)
    }
}

/// Covariance of `(W1(s), W2(t))`: `[[s, ρ min(s,t)], [ρ min(s,t), t]]`.
pub fn cov_matrix<T: Real>(s: T, t: T, rho: T) -> Result<Matrix2<T>> {
    let ok =
        s > T::zero() && t > T::zero() && rho.abs() < T::one() && s.is_finite() && t.is_finite();
    if !ok {
        return Err(RuinError::DegenerateCovariance {
            s: s.as_f64(),
            t: t.as_f64(),
            rho: rho.as_f64(),
        });
    }
    Ok(Matrix2::new(s, rho * s.min(t), t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_examples() {
        assert_eq!(
            cov_matrix(1.0_f64, 1.0, 0.5).unwrap(),
            Matrix2::new(1.0_f64, 0.5, 1.0)
        );
        let m = cov_matrix(0.5_f64, 1.0, -0.3).unwrap();
        assert!((m.m12 + 0.15).abs() < 1e-16);
        assert_eq!((m.m11, m.m22), (0.5, 1.0));
        let (t, rho) = (0.7_f64, 0.4);
        let m = cov_matrix(1.0_f64, t, rho).unwrap();
        assert!((m.det() - (t - rho * rho * t * t)).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_arguments() {
        assert!(cov_matrix(0.0_f64, 1.0, 0.1).is_err());
        assert!(cov_matrix(1.0_f64, -1.0, 0.1).is_err());
        assert!(cov_matrix(1.0_f64, 1.0, 1.0).is_err());
        assert!(cov_matrix(1.0_f64, 1.0, -1.0).is_err());
    }

    #[test]
    fn inverse_is_inverse() {
        let m = Matrix2::new(2.0_f64, 0.3, 0.7);
        let inv = m.inverse().unwrap();
        let (a, b) = m.mul_vec(inv.m11, inv.m12);
        let (c, d) = m.mul_vec(inv.m12, inv.m22);
        assert!((a - 1.0).abs() < 1e-15 && b.abs() < 1e-15);
        assert!(c.abs() < 1e-15 && (d - 1.0).abs() < 1e-15);
    }
}
