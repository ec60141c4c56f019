//! Simulation of the Pickands-type constant
//! `C1 = ∫∫ P{∃ s,t ≥ 0: W1(s) − s > x, W2(t) − a t > y} e^{λ1 x + λ2 y} dx dy`
//! truncated to `s, t ∈ [0, Δ]`.
//!
//! For fixed suprema `X`, `Y` the integrand integrates in closed form:
//! `∫∫ 1{X > x, Y > y} e^{λ1 x + λ2 y} dx dy = e^{λ1 X + λ2 Y} / (λ1 λ2)`,
//! so the estimator is the sample mean of that quantity.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::asymptotics::lambdas;
use crate::error::{invalid, Result};
use crate::montecarlo::estimate::{Accumulator, MCEstimate};
use crate::montecarlo::pool::with_pool;
use crate::montecarlo::rng::{key_from_seed, stream_rng};
use crate::montecarlo::ruin::MCConfig;

fn checked_lambdas(rho: f64, a: f64) -> Result<(f64, f64)> {
    if !(rho.abs() < 1.0) {
        return invalid("rho", rho, "must satisfy |rho| < 1");
    }
    if !(a > 0.0 && a <= 1.0) {
        return invalid("a", a, "must lie in (0, 1]");
    }
    let (l1, l2) = lambdas(rho, a)?;
    if !(l1 > 0.0) {
        return invalid("lambda1", l1, "must be positive");
    }
    if !(l2 > 0.0) {
        return invalid("lambda2", l2, "must be positive (needs a > rho)");
    }
    Ok((l1, l2))
}

/// Estimate of `C1` over the horizon `[0, delta]` with `cfg.grid_points`
/// steps.
pub fn estimate_pickands_c1(rho: f64, a: f64, delta: f64, cfg: &MCConfig) -> Result<MCEstimate> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return invalid("delta", delta, "must be non-negative");
    }
    if delta == 0.0 {
        let (l1, l2) = checked_lambdas(rho, a)?;
        cfg.validate()?;
        return Ok(MCEstimate::new(1.0 / (l1 * l2), 0.0, cfg.n_samples));
    }
    Ok(pickands_profile(rho, a, &[delta], cfg)?.remove(0))
}

/// Estimates for several horizons on common paths: the step is
/// `max(deltas) / grid_points` and each shorter horizon uses a prefix of the
/// same path, so the estimates are non-decreasing in the horizon path by path.
pub fn pickands_profile(
    rho: f64,
    a: f64,
    deltas: &[f64],
    cfg: &MCConfig,
) -> Result<Vec<MCEstimate>> {
    let (l1, l2) = checked_lambdas(rho, a)?;
    cfg.validate()?;
    if deltas.is_empty() {
        return Ok(Vec::new());
    }
    for &d in deltas {
        if !(d > 0.0 && d.is_finite()) {
            return invalid("delta", d, "must be positive");
        }
    }
    let longest = deltas.iter().copied().fold(0.0, f64::max);
    let steps = cfg.grid_points;
    let h = longest / steps as f64;
    let cut: Vec<usize> = deltas
        .iter()
        .map(|d| ((d / h).round() as usize).clamp(1, steps))
        .collect();
    let root = h.sqrt();
    let sigma = (1.0 - rho * rho).sqrt();
    let norm = 1.0 / (l1 * l2);
    let key = key_from_seed(cfg.seed);
    let chunks = cfg.n_samples.div_ceil(cfg.chunk_size);

    let per_chunk = with_pool(cfg.threads, || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut accs = vec![Accumulator::default(); deltas.len()];
                let mut sup1 = vec![0.0; steps + 1];
                let mut sup2 = vec![0.0; steps + 1];
                let lo = c * cfg.chunk_size;
                let hi = (lo + cfg.chunk_size).min(cfg.n_samples);
                for path in lo..hi {
                    let mut rng = stream_rng(&key, path);
                    let (mut w1, mut w2) = (0.0_f64, 0.0_f64);
                    let (mut x, mut y) = (0.0_f64, 0.0_f64);
                    for k in 1..=steps {
                        let z1: f64 = StandardNormal.sample(&mut rng);
                        let z2: f64 = StandardNormal.sample(&mut rng);
                        w1 += root * z1;
                        w2 += root * (rho * z1 + sigma * z2);
                        let t = k as f64 * h;
                        x = x.max(w1 - t);
                        y = y.max(w2 - a * t);
                        sup1[k] = x;
                        sup2[k] = y;
                    }
                    for (acc, &n) in accs.iter_mut().zip(&cut) {
                        acc.push(norm * (l1 * sup1[n] + l2 * sup2[n]).exp());
                    }
                }
                accs
            })
            .collect::<Vec<_>>()
    })?;
    let mut total = vec![Accumulator::default(); deltas.len()];
    for accs in &per_chunk {
        for (t, a) in total.iter_mut().zip(accs) {
            t.merge(a);
        }
    }
    Ok(total.iter().map(Accumulator::estimate).collect())
}
