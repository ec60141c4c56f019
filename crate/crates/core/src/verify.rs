//! The acceptance suite: closed-form identities, brute-force oracles and
//! statistical checks of the simulators against the formulas.
//!
//! Reports are plain text with fixed float formatting, so two runs with the
//! same options produce identical bytes whatever the thread count.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asymptotics::{
    approximant_with, critical_rho, gaussian_sum, gaussian_sum_limit, lemma33_integral, minimize_q,
    t_star, tau_constant, ApproxOptions, ConstantsForm, Lemma33Variant, Regime, SumVariant,
};
use crate::error::Result;
use crate::exact::{independent_ruin, ruin_bounds, single_ruin, ModelParams};
use crate::gauss::quadratic_form_q;
use crate::montecarlo::{
    estimate_pickands_c1, mc_ruin, mc_ruin_importance, pickands_profile, resolution_study, MCConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// Formula and identity checks; seconds.
    Quick,
    /// Adds the simulation checks; minutes.
    Full,
}

/// Criteria run at each level.
pub const QUICK: [u32; 6] = [1, 2, 3, 4, 8, 9];
pub const FULL: [u32; 13] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13];

/// Signature of the `τ` constant, replaceable to check that the suite
/// notices a wrong value.
pub type TauFn = fn(Regime, f64, f64) -> Result<f64>;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    pub threads: Option<usize>,
    /// Multiplies every path count; 1 gives the full sample sizes.
    pub budget: f64,
    pub tau: TauFn,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            threads: None,
            budget: 1.0,
            tau: tau_constant::<f64>,
        }
    }
}

impl VerifyOptions {
    fn paths(&self, n: u64) -> u64 {
        ((n as f64 * self.budget).round() as u64).max(1000)
    }

    fn mc(&self, n: u64, grid_points: usize) -> MCConfig {
        MCConfig {
            n_samples: self.paths(n),
            grid_points,
            seed: self.seed,
            threads: self.threads,
            ..MCConfig::default()
        }
    }

    /// Generator for the random configurations of criterion `id`.
    fn rng(&self, id: u32) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ u64::from(id))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "[{:>2}] {} {:<26} {}",
            self.id,
            if self.passed { "pass" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub criteria: Vec<CriterionReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            out.push_str(&c.line());
            out.push('\n');
        }
        let ok = self.criteria.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "{ok}/{} criteria passed", self.criteria.len());
        out
    }
}

pub fn run(level: Level, opts: &VerifyOptions) -> VerifyReport {
    let ids: &[u32] = match level {
        Level::Quick => &QUICK,
        Level::Full => &FULL,
    };
    VerifyReport {
        criteria: ids.iter().map(|&id| criterion(id, opts)).collect(),
    }
}

/// Name of criterion `id`.
pub fn name(id: u32) -> &'static str {
    match id {
        1 => "tau at a=1, rho=-1/2",
        2 => "critical rho at a=1",
        3 => "critical boundary oracle",
        4 => "optimizer vs grid search",
        5 => "bounds sandwich",
        6 => "independent factorization",
        7 => "one-dimensional exactness",
        8 => "one-sided integral limits",
        9 => "gaussian sum limits",
        10 => "pickands constant",
        11 => "regime IV ratio trend",
        12 => "log-asymptotics",
        13 => "determinism",
        _ => "unknown",
    }
}

/// Runs criterion `id`. A numeric error inside a check counts as a failure
/// and is reported in the detail.
pub fn criterion(id: u32, opts: &VerifyOptions) -> CriterionReport {
    let outcome = match id {
        1 => tau_exact(opts),
        2 => critical_exact(),
        3 => boundary_oracle(opts),
        4 => optimizer_grid(opts),
        5 => sandwich(opts),
        6 => factorization(opts),
        7 => one_dimensional(opts),
        8 => one_sided_integrals(),
        9 => gaussian_sums(),
        10 => pickands(opts),
        11 => regime_four_trend(opts),
        12 => log_asymptotics(opts),
        13 => determinism(opts),
        _ => Ok((false, "no such criterion".to_string())),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionReport {
        id,
        name: name(id),
        passed,
        detail,
    }
}

type Outcome = Result<(bool, String)>;

fn tau_exact(opts: &VerifyOptions) -> Outcome {
    let tau = (opts.tau)(Regime::FullDimIII, -0.5, 1.0)?;
    let err = (tau - 4.0 / 3.0).abs();
    Ok((
        err <= 1e-12,
        format!("tau = {tau:.17}, |tau - 4/3| = {err:.3e}"),
    ))
}

fn critical_exact() -> Outcome {
    let r: f64 = critical_rho(1.0)?;
    let err = (r + 0.5).abs();
    Ok((
        err <= 1e-12,
        format!("A_1 = {r:.17}, |A_1 + 1/2| = {err:.3e}"),
    ))
}

/// Second-order coefficient of the expansion in `t` at `s = t = 1`.
fn tau2(rho: f64, a: f64) -> f64 {
    let r2 = rho * rho;
    (-r2 + 2.0 * a * rho * r2 + a * a - 2.0 * a * a * r2) / ((1.0 - r2) * (1.0 - r2))
}

fn boundary_oracle(opts: &VerifyOptions) -> Outcome {
    let mut rng = opts.rng(3);
    let mut bad = 0;
    let mut worst_tau2: f64 = 0.0;
    for _ in 0..500 {
        let a: f64 = rng.random_range(1e-3..1.0);
        let r = critical_rho(a)?;
        let below = t_star(r - 1e-6, a)?;
        let above = t_star(r + 1e-6, a)?;
        let at = tau2(r, a);
        worst_tau2 = worst_tau2.max(at.abs());
        let flips = tau2(r - 1e-6, a) * tau2(r + 1e-6, a) < 0.0;
        if !(below < 1.0 && above > 1.0 && at.abs() < 1e-6 && flips) {
            bad += 1;
        }
    }
    Ok((
        bad == 0,
        format!("500 draws, {bad} violations, max |tau2(A_a)| = {worst_tau2:.3e}"),
    ))
}

fn optimizer_grid(opts: &VerifyOptions) -> Outcome {
    const N: usize = 400;
    let mut rng = opts.rng(4);
    let (mut off_cell, mut worst_gap) = (0, 0.0_f64);
    for _ in 0..200 {
        let a: f64 = rng.random_range(0.05..1.0);
        let rho: f64 = rng.random_range(-0.95..(a.min(0.95) - 0.02));
        let opt = minimize_q(rho, a)?;
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 1..=N {
            let s = i as f64 / N as f64;
            for j in 1..=N {
                let t = j as f64 / N as f64;
                let q = quadratic_form_q(s, t, rho, a)?;
                if q < best.0 {
                    best = (q, s, t);
                }
            }
        }
        let cell = 1.0 / N as f64 + 1e-12;
        let near = opt
            .points
            .iter()
            .any(|&(s, t)| (s - best.1).abs() <= cell && (t - best.2).abs() <= cell);
        if !near {
            off_cell += 1;
        }
        worst_gap = worst_gap.max((best.0 - opt.q_min).abs());
    }
    Ok((
        off_cell == 0 && worst_gap <= 1e-4,
        format!("200 draws, {off_cell} outside one cell, max |q_grid - q_min| = {worst_gap:.3e}"),
    ))
}

fn sandwich(opts: &VerifyOptions) -> Outcome {
    let mut rng = opts.rng(5);
    let cfg = opts.mc(1_000_000, 1 << 14);
    let mut misses = 0;
    let mut worst = f64::NEG_INFINITY;
    for k in 0..20 {
        let rho = [0.2, 0.5, 0.8][rng.random_range(0..3)];
        let u: f64 = rng.random_range(0.5..2.5);
        let v: f64 = rng.random_range(0.5..2.5);
        let c1: f64 = rng.random_range(0.0..1.0);
        let c2: f64 = rng.random_range(0.0..1.0);
        let p = ModelParams::with_levels(rho, c1, c2, u, v);
        let b = ruin_bounds(&p)?;
        let e = mc_ruin(
            &p,
            &MCConfig {
                seed: opts.seed + k,
                ..cfg
            },
        )?;
        // Distance outside the band in standard errors (negative inside).
        let se = e.std_error.max(f64::MIN_POSITIVE);
        let out = ((b.lower - e.mean) / se).max((e.mean - b.upper) / se);
        worst = worst.max(out);
        if e.mean < b.lower - 3.0 * e.std_error || e.mean > b.upper + 3.0 * e.std_error {
            misses += 1;
        }
    }
    Ok((
        misses == 0,
        format!(
            "20 configs, {} paths each, {misses} outside [lower-3SE, upper+3SE], worst excess {worst:.2} SE",
            cfg.n_samples
        ),
    ))
}

fn factorization(opts: &VerifyOptions) -> Outcome {
    let mut rng = opts.rng(6);
    let cfg = opts.mc(1_000_000, 1 << 20);
    let mut configs = vec![(0.0, 0.0, 1.0, 1.0)];
    for _ in 0..2 {
        configs.push((
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.5..2.0),
            rng.random_range(0.5..2.0),
        ));
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for (c1, c2, u, v) in configs {
        let exact = independent_ruin(c1, c2, u, v)?;
        let e = mc_ruin(&ModelParams::with_levels(0.0, c1, c2, u, v), &cfg)?;
        let z = (e.mean - exact) / e.std_error;
        ok &= z.abs() <= 3.0;
        parts.push(format!("{exact:.6}/{:.6} z={z:+.2}", e.mean));
    }
    Ok((ok, format!("exact/mc {}", parts.join(", "))))
}

fn one_dimensional(opts: &VerifyOptions) -> Outcome {
    let (c1, u) = (1.0, 1.0);
    // The second level sits far below zero, so its condition always holds.
    let p = ModelParams::with_levels(0.3, c1, 0.0, u, -1e6);
    let exact = single_ruin(c1, u, 1.0)?;
    let study = resolution_study(&p, &[12, 13, 14], &opts.mc(1_000_000, 1 << 14))?;
    let x = study.extrapolated;
    let z = (x.mean - exact) / x.std_error;
    let rel = (x.mean - exact).abs() / exact;
    let raw: Vec<String> = study
        .estimates
        .iter()
        .map(|e| format!("{:.6}", e.mean))
        .collect();
    Ok((
        z.abs() <= 3.0 && rel <= 0.02,
        format!(
            "exact {exact:.6}, grids 2^12..2^14 {}, extrapolated {:.6} z={z:+.2} rel {rel:.4}",
            raw.join("/"),
            x.mean
        ),
    ))
}

fn one_sided_integrals() -> Outcome {
    let i1: f64 = lemma33_integral(1.0, 1.0, 50.0, Lemma33Variant::OneSided)?;
    let i2: f64 = lemma33_integral(1.0, 2.0, 200.0, Lemma33Variant::Normalized)?;
    let (e1, e2) = ((i1 - 2.0).abs(), (i2 - 1.0).abs());
    Ok((
        e1 <= 1e-3 && e2 <= 2e-2,
        format!("one-sided(50) = {i1:.6}, normalized(200) = {i2:.6}"),
    ))
}

fn gaussian_sums() -> Outcome {
    let mut worst: f64 = 0.0;
    for (c1, c2) in [(1.0, 0.0), (2.0, 1.0), (1.0, -1.0)] {
        for variant in [SumVariant::OneSided, SumVariant::TwoSided] {
            let brute = gaussian_sum(c1, c2, 1e4, 1.0, variant)?;
            let limit = gaussian_sum_limit(c1, c2, variant)?;
            worst = worst.max((brute / limit - 1.0).abs());
        }
    }
    Ok((
        worst < 1e-2,
        format!("6 cases at u=1e4, max relative error {worst:.3e}"),
    ))
}

fn pickands(opts: &VerifyOptions) -> Outcome {
    let cfg = opts.mc(100_000, 4096);
    let profile = pickands_profile(0.0, 1.0, &[2.0, 4.0, 8.0], &cfg)?;
    let half = estimate_pickands_c1(0.0, 0.5, 8.0, &cfg)?;
    let c = profile[2].mean;
    let monotone = profile.windows(2).all(|w| w[1].mean >= w[0].mean);
    let ok = (c / 4.0 - 1.0).abs() <= 0.1 && (half.mean / 8.0 - 1.0).abs() <= 0.1 && monotone;
    Ok((
        ok,
        format!(
            "a=1: {:.4}/{:.4}/{c:.4} at delta 2/4/8 (want 4), a=0.5: {:.4} (want 8)",
            profile[0].mean, profile[1].mean, half.mean
        ),
    ))
}

fn regime_four_trend(opts: &VerifyOptions) -> Outcome {
    let cfg = opts.mc(400_000, 1 << 26);
    let corrected = ApproxOptions::default();
    let printed = ApproxOptions {
        constants: ConstantsForm::Printed,
        ..ApproxOptions::default()
    };
    let mut ratios = Vec::new();
    let mut parts = Vec::new();
    for u in [3.0, 4.0, 5.0] {
        let p = ModelParams::with_ratio(-0.9, 0.5, 0.5, u, 0.5);
        let e = mc_ruin_importance(&p, &cfg)?;
        let c = approximant_with(&p, Regime::FullDimIV, u, &corrected)?.value;
        let pr = approximant_with(&p, Regime::FullDimIV, u, &printed)?.value;
        ratios.push(e.mean / c);
        parts.push(format!(
            "u={u}: {:.4}±{:.4} (printed {:.3})",
            e.mean / c,
            e.std_error / c,
            e.mean / pr
        ));
    }
    let dev: Vec<f64> = ratios.iter().map(|r| (r - 1.0).abs()).collect();
    let ok = dev[2] <= 0.25 && dev[1] <= dev[0] && dev[2] <= dev[1];
    Ok((ok, format!("ratio {}", parts.join(", "))))
}

fn log_asymptotics(opts: &VerifyOptions) -> Outcome {
    let cfg = opts.mc(100_000, 1 << 20);
    let u = 5.0;
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, rho, a) in [("I", -0.3, 1.0), ("IV", -0.9, 0.5)] {
        let e = mc_ruin_importance(&ModelParams::with_ratio(rho, 0.0, 0.0, u, a), &cfg)?;
        let q = minimize_q(rho, a)?.q_min;
        let est = -2.0 * e.mean.ln() / (u * u);
        let rel = (est / q - 1.0).abs();
        ok &= rel <= 0.15;
        parts.push(format!("{label}: {est:.4} vs q* {q:.4} ({rel:.3})"));
    }
    Ok((ok, parts.join(", ")))
}

/// Sample-size multiplier of the nested runs in the determinism check.
const DETERMINISM_BUDGET: f64 = 0.01;

fn determinism(opts: &VerifyOptions) -> Outcome {
    let inner = |threads: usize| {
        let o = VerifyOptions {
            threads: Some(threads),
            budget: opts.budget * DETERMINISM_BUDGET,
            ..*opts
        };
        let report = VerifyReport {
            criteria: FULL[..12].iter().map(|&id| criterion(id, &o)).collect(),
        };
        report.render()
    };
    let runs: Vec<String> = [1, 1, 4, 4, 8, 8].into_iter().map(inner).collect();
    let same = runs.iter().all(|r| *r == runs[0]);
    Ok((
        same,
        format!(
            "criteria 1-12 at {}x paths, two runs each under 1, 4 and 8 threads: {}",
            opts.budget * DETERMINISM_BUDGET,
            if same { "identical" } else { "differ" }
        ),
    ))
}
