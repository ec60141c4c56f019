//! Standard normal density, distribution function and upper tail.
//!
//! Near the origin Φ comes from the all-positive series
//! `Φ(x) = 1/2 + φ(x) Σ x^{2n+1} / (2n+1)!!`. Further out the upper tail is
//! `Ψ(x) = φ(x) R(x)` with the Mills ratio `R` from its continued fraction, so
//! `Ψ` keeps full relative accuracy deep into the tail.

// Tabulated constants keep all their published digits.
#![allow(clippy::excessive_precision)]

use crate::scalar::Real;

const SERIES_CUTOFF: f64 = 2.5;
const MAX_TERMS: usize = 500;

/// Standard normal density.
#[inline]
pub fn std_normal_pdf<T: Real>(x: T) -> T {
    (-T::lit(0.5) * x * x).exp() / (T::PI() + T::PI()).sqrt()
}

#[inline]
pub fn std_normal_log_pdf<T: Real>(x: T) -> T {
    -T::lit(0.5) * x * x - T::lit(0.5) * (T::PI() + T::PI()).ln()
}

// Σ x^{2n+1}/(2n+1)!!, so that Φ(x) = 1/2 + φ(x)·series(x).
fn odd_series<T: Real>(x: T) -> T {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut denom = T::one();
    for _ in 0..MAX_TERMS {
        denom = denom + T::lit(2.0);
        term = term * x2 / denom;
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    sum
}

/// Mills ratio `Ψ(x)/φ(x)` for `x > 0` by the modified Lentz algorithm on
/// `R(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...))))`.
pub fn mills_ratio<T: Real>(x: T) -> T {
    let tiny = T::min_positive_value().sqrt();
    let mut f = x;
    let mut c = x;
    let mut d = T::zero();
    for k in 1..=MAX_TERMS {
        let a = T::from_usize(k).unwrap();
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    f.recip()
}

/// Upper tail `Ψ(x) = P{N > x}`, accurate in relative terms for large `x`.
pub fn std_normal_sf<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x == T::infinity() {
        return T::zero();
    }
    if x == T::neg_infinity() {
        return T::one();
    }
    let cut = T::lit(SERIES_CUTOFF);
    if x.abs() < cut {
        T::lit(0.5) - std_normal_pdf(x) * odd_series(x)
    } else if x > T::zero() {
        std_normal_pdf(x) * mills_ratio(x)
    } else {
        T::one() - std_normal_pdf(x) * mills_ratio(-x)
    }
}

/// Distribution function `Φ(x)`.
#[inline]
pub fn std_normal_cdf<T: Real>(x: T) -> T {
    std_normal_sf(-x)
}

/// `log Ψ(x)`, finite for every finite `x`.
pub fn std_normal_log_sf<T: Real>(x: T) -> T {
    if x == T::infinity() {
        return T::neg_infinity();
    }
    if x >= T::lit(SERIES_CUTOFF) {
        std_normal_log_pdf(x) + mills_ratio(x).ln()
    } else if x > -T::lit(SERIES_CUTOFF) {
        std_normal_sf(x).ln()
    } else {
        // Ψ(x) = 1 − Ψ(−x) with Ψ(−x) small.
        (-std_normal_sf(-x)).ln_1p()
    }
}

#[inline]
pub fn std_normal_log_cdf<T: Real>(x: T) -> T {
    std_normal_log_sf(-x)
}
