use crate::asymptotics::regime::Regime;
use crate::error::{invalid, Result, RuinError};
use crate::gauss::{cov_matrix, std_normal_cdf, std_normal_log_cdf};
use crate::quad::{integrate, QuadSettings};
use crate::scalar::Real;

/// Linear drift coefficient of the exponent near the optimizer `(1, t)`:
/// `M = (0, c2) Σ⁻¹ (1, a)ᵀ − (c1, c2) [ D'/D Σ⁻¹ − K/D ] (1, a)ᵀ` with
/// `Σ = Σ_{1,t}`, `D = t − ρ²t²`, `D' = 1 − 2ρ²t` and `K = [[1, −ρ], [−ρ, 0]]`.
#[allow(non_snake_case)]
pub fn big_M<T: Real>(c1: T, c2: T, t: T, rho: T, a: T) -> Result<T> {
    if !(t > T::zero() && t <= T::one()) {
        return invalid("t", t.as_f64(), "must lie in (0, 1]");
    }
    let inv = cov_matrix(T::one(), t, rho)?.inverse()?;
    let d = t - rho * rho * t * t;
    let dp = T::one() - T::lit(2.0) * rho * rho * t;
    let first = inv.bilinear(T::zero(), c2, T::one(), a);
    // K (1, a)ᵀ = (1 − ρa, −ρ).
    let k_term = c1 * (T::one() - rho * a) - c2 * rho;
    let second = dp / d * inv.bilinear(c1, c2, T::one(), a) - k_term / d;
    Ok(first - second)
}

/// Second-order coefficient `τ` of the regimes with a Gaussian sum.
pub fn tau_constant<T: Real>(regime: Regime, rho: T, a: T) -> Result<T> {
    let one = T::one();
    let tau = match regime {
        Regime::FullDimII | Regime::FullDimIII => {
            let r2 = rho * rho;
            let num = r2 * r2 - T::lit(2.0) * a * r2 * r2 * rho - T::lit(3.0) * a * a * r2
                + T::lit(3.0) * a * a * r2 * r2
                + a * a;
            num / (one - r2).powi(3)
        }
        Regime::FullDimIV | Regime::FullDimV => {
            let k = one - T::lit(2.0) * a * rho;
            -(rho * rho * rho) * k.powi(4) / (T::lit(2.0) * a * (one - a * rho))
        }
        _ => return Err(RuinError::Undefined("tau outside regimes II to V")),
    };
    if tau > T::zero() && tau.is_finite() {
        Ok(tau)
    } else {
        Err(RuinError::Numeric {
            op: "tau_constant",
            detail: format!("non-positive tau {tau} at rho = {rho}, a = {a}"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma33Variant {
    /// `∫ P{sup_{[0,Δ]}(B(t) − bt) > x} e^{cx} dx`, `2b > c > 0`.
    OneSided,
    /// The same with `c = 2b`, divided by `Δ`.
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumVariant {
    OneSided,
    TwoSided,
}

/// Large-`Δ` limit of the one-dimensional drifted-supremum integrals.
pub fn lemma33_limit<T: Real>(b: T, c: T, variant: Lemma33Variant) -> Result<T> {
    if !(b > T::zero()) {
        return invalid("b", b.as_f64(), "must be positive");
    }
    match variant {
        Lemma33Variant::OneSided => {
            if !(c > T::zero() && b + b > c) {
                return invalid("c", c.as_f64(), "requires 2b > c > 0");
            }
            Ok((b + b - c).recip() + c.recip())
        }
        Lemma33Variant::Normalized => Ok(b),
    }
}

/// Finite-`Δ` value of the same integrals by quadrature over the exact
/// finite-horizon law of the drifted supremum.
pub fn lemma33_integral<T: Real>(b: T, c: T, delta: T, variant: Lemma33Variant) -> Result<T> {
    lemma33_limit(b, c, variant)?;
    if !(delta > T::zero()) {
        return invalid("delta", delta.as_f64(), "must be positive");
    }
    let c = match variant {
        Lemma33Variant::OneSided => c,
        Lemma33Variant::Normalized => b + b,
    };
    let r = delta.sqrt();
    // For x < 0 the probability is one, contributing 1/c. For x ≥ 0 the
    // crossing probability is Φ(−x/√Δ − b√Δ) + e^{−2bx} Φ(−x/√Δ + b√Δ).
    let integrand = |x: T| {
        let first = c * x + std_normal_log_cdf(-x / r - b * r);
        let second = (c - b - b) * x + std_normal_log_cdf(-x / r + b * r);
        first.exp() + second.exp()
    };
    // Past x ≈ bΔ the integrand has a Gaussian tail of width √Δ.
    let knee = b * delta;
    let mut hi = knee + T::lit(40.0) * r;
    if b + b > c {
        hi = hi + T::lit(40.0) / (b + b - c);
    }
    let settings = QuadSettings {
        abs_tol: T::lit(1e-13),
        rel_tol: T::lit(1e-12),
        max_intervals: 4000,
    };
    let mut total = c.recip();
    let mut lo = T::zero();
    for edge in [knee, hi] {
        if edge > lo {
            total = total + integrate(integrand, lo, edge, settings)?.value;
            lo = edge;
        }
    }
    Ok(match variant {
        Lemma33Variant::OneSided => total,
        Lemma33Variant::Normalized => total / delta,
    })
}

/// `√(2π) Φ(C2/√C1) e^{C2²/(2C1)}` (one-sided) or `√(2π) e^{C2²/(2C1)}`.
pub fn gaussian_sum_limit<T: Real>(c1: T, c2: T, variant: SumVariant) -> Result<T> {
    if !(c1 > T::zero()) {
        return invalid("C1", c1.as_f64(), "must be positive");
    }
    let root = (T::PI() + T::PI()).sqrt();
    let e = (c2 * c2 / (c1 + c1)).exp();
    Ok(match variant {
        SumVariant::OneSided => root * std_normal_cdf(c2 / c1.sqrt()) * e,
        SumVariant::TwoSided => root * e,
    })
}

/// Direct evaluation of the Riemann sum
/// `Σ_l (√C1 Δ/u) exp(C2 (l−1)Δ/u − C1/2 ((l−1)Δ/u)²)` over
/// `l ∈ [1, u log u]` or `l ∈ [−u log u, u log u]`.
pub fn gaussian_sum(c1: f64, c2: f64, u: f64, delta: f64, variant: SumVariant) -> Result<f64> {
    if !(c1 > 0.0) {
        return invalid("C1", c1, "must be positive");
    }
    if !(u > 1.0) {
        return invalid("u", u, "must exceed 1");
    }
    let top = (u * u.ln()).floor() as i64;
    let start = match variant {
        SumVariant::OneSided => 1,
        SumVariant::TwoSided => -top,
    };
    let h = delta / u;
    let mut sum = 0.0;
    for l in start..=top {
        let x = (l - 1) as f64 * h;
        sum += (c2 * x - 0.5 * c1 * x * x).exp();
    }
    Ok(sum * c1.sqrt() * h)
}
