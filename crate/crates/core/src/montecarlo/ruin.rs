//! Crude estimators of the joint ruin probability
//! `P{max_s X1(s) > u, max_t X2(t) > v}` over the simulation grid.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::exact::{single_ruin, ModelParams};
use crate::montecarlo::bridge::{PathModel, Walker};
use crate::montecarlo::drift::DriftSchedule;
use crate::montecarlo::estimate::{Accumulator, MCEstimate};
use crate::montecarlo::path::sample_drivers;
use crate::montecarlo::pool::with_pool;
use crate::montecarlo::rng::{key_from_seed, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCConfig {
    pub n_samples: u64,
    /// Number of equal time steps on the horizon. Powers of two use the lazy
    /// bridge construction; other values fall back to sequential increments.
    pub grid_points: usize,
    pub seed: u64,
    /// Constant drift `(μ1, μ2)` added to `(W1, W2)` under the sampling
    /// measure; `None` lets the importance sampler choose its own.
    pub tilt: Option<(f64, f64)>,
    pub chunk_size: u64,
    /// Worker threads; `None` defers to `RUIN_THREADS`.
    pub threads: Option<usize>,
}

impl Default for MCConfig {
    fn default() -> Self {
        Self {
            n_samples: 100_000,
            grid_points: 1 << 14,
            seed: 1,
            tilt: None,
            chunk_size: 4096,
            threads: None,
        }
    }
}

impl MCConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1 {
            return invalid("n_samples", 0.0, "must be at least 1");
        }
        if self.grid_points < 2 {
            return invalid("grid_points", self.grid_points as f64, "must be at least 2");
        }
        if self.chunk_size < 1 {
            return invalid("chunk_size", 0.0, "must be at least 1");
        }
        if let Some((a, b)) = self.tilt {
            if !(a.is_finite() && b.is_finite()) {
                return invalid("tilt", if a.is_finite() { b } else { a }, "must be finite");
            }
        }
        Ok(())
    }

    /// `log2(grid_points)` when it is a power of two.
    pub fn dyadic_depth(&self) -> Option<u32> {
        self.grid_points
            .is_power_of_two()
            .then(|| self.grid_points.trailing_zeros())
    }
}

pub(crate) fn check_params(params: &ModelParams<f64>) -> Result<()> {
    params.validate()?;
    if !params.v().is_finite() {
        return invalid("v", params.v(), "must be finite");
    }
    Ok(())
}

/// Crude sampler: one undrifted path at a time.
pub(crate) struct Sampler<'m> {
    model: &'m PathModel,
    key: [u8; 32],
    walker: Walker<'m>,
    depth: Option<u32>,
    steps: usize,
    drivers: Vec<(f64, f64)>,
}

impl<'m> Sampler<'m> {
    fn new(model: &'m PathModel, key: [u8; 32], steps: usize) -> Self {
        Self {
            model,
            key,
            walker: Walker::new(model, &key),
            depth: steps.is_power_of_two().then(|| steps.trailing_zeros()),
            steps,
            drivers: Vec::new(),
        }
    }

    fn start(&mut self, path: u64) {
        if self.depth.is_some() {
            self.walker.start(2 * path);
        } else {
            let mut rng = stream_rng(&self.key, 2 * path);
            self.drivers = sample_drivers(self.steps, self.model.horizon, &mut rng);
        }
    }

    fn full_value(&self, coord: usize, k: usize) -> f64 {
        let (b1, b2) = self.drivers[k];
        self.model.coordinate(
            coord,
            k as f64 * self.model.horizon / self.steps as f64,
            b1,
            b2,
        )
    }

    fn exceeds(&mut self, coord: usize, level: f64) -> bool {
        match self.depth {
            Some(d) => self.walker.exceeds(coord, level, d),
            None => (0..=self.steps).any(|k| self.full_value(coord, k) > level),
        }
    }

    fn exceeds_at(&mut self, coord: usize, level: f64, depth: u32) -> bool {
        self.walker.exceeds(coord, level, depth)
    }

    fn grid_max(&mut self, coord: usize, floor: f64) -> Option<f64> {
        match self.depth {
            Some(d) => self.walker.grid_max(coord, floor, d),
            None => {
                let best = (0..=self.steps)
                    .map(|k| self.full_value(coord, k))
                    .fold(f64::NEG_INFINITY, f64::max);
                (best > floor).then_some(best)
            }
        }
    }
}

/// Runs `per_path` over all paths in deterministic chunks and merges the
/// per-chunk statistics in chunk order. `make` builds the per-chunk state.
pub(crate) fn run_chunks<S, M, F>(
    cfg: &MCConfig,
    outputs: usize,
    make: M,
    per_path: F,
) -> Result<Vec<Accumulator>>
where
    M: Fn() -> S + Sync,
    F: Fn(&mut S, u64, &mut [f64]) + Sync,
{
    cfg.validate()?;
    let chunks = cfg.n_samples.div_ceil(cfg.chunk_size);
    let per_chunk = with_pool(cfg.threads, || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut state = make();
                let mut accs = vec![Accumulator::default(); outputs];
                let mut obs = vec![0.0; outputs];
                let lo = c * cfg.chunk_size;
                let hi = (lo + cfg.chunk_size).min(cfg.n_samples);
                for path in lo..hi {
                    per_path(&mut state, path, &mut obs);
                    for (a, &x) in accs.iter_mut().zip(&obs) {
                        a.push(x);
                    }
                }
                accs
            })
            .collect::<Vec<_>>()
    })?;
    let mut total = vec![Accumulator::default(); outputs];
    for accs in &per_chunk {
        for (t, a) in total.iter_mut().zip(accs) {
            t.merge(a);
        }
    }
    Ok(total)
}

fn run_crude<F>(
    params: &ModelParams<f64>,
    cfg: &MCConfig,
    outputs: usize,
    per_path: F,
) -> Result<Vec<Accumulator>>
where
    F: Fn(&mut Sampler<'_>, &mut [f64]) + Sync,
{
    let model = base_model(params, cfg);
    let key = key_from_seed(cfg.seed);
    run_chunks(
        cfg,
        outputs,
        || Sampler::new(&model, key, cfg.grid_points),
        |s, path, out| {
            s.start(path);
            per_path(s, out);
        },
    )
}

pub(crate) fn base_model(params: &ModelParams<f64>, cfg: &MCConfig) -> PathModel {
    let depth = cfg.dyadic_depth().unwrap_or(0);
    PathModel::new(
        params.rho,
        params.c1,
        params.c2,
        params.horizon,
        depth,
        DriftSchedule::null(params.horizon),
    )
}

/// Coordinate order for the joint test: the rarer marginal event first, so
/// most paths are rejected after one search.
pub(crate) fn check_order(params: &ModelParams<f64>) -> [usize; 2] {
    let p = params.normalized();
    let m1 = single_ruin(p.c1, p.u.max(0.0), 1.0).unwrap_or(1.0);
    let m2 = single_ruin(p.c2, p.v().max(0.0), 1.0).unwrap_or(1.0);
    if m2 < m1 {
        [1, 0]
    } else {
        [0, 1]
    }
}

fn joint_indicator(s: &mut Sampler<'_>, order: [usize; 2], levels: [f64; 2]) -> bool {
    s.exceeds(order[0], levels[order[0]]) && s.exceeds(order[1], levels[order[1]])
}

/// Crude estimate: fraction of grid paths on which both portfolios ruin.
///
/// The grid supremum never exceeds the continuous one, so the estimate is
/// biased low by an amount of order `√(T/grid_points)`.
pub fn mc_ruin(params: &ModelParams<f64>, cfg: &MCConfig) -> Result<MCEstimate> {
    check_params(params)?;
    if cfg.tilt.is_some() {
        return invalid("tilt", f64::NAN, "the crude estimator takes no tilt");
    }
    let order = check_order(params);
    let levels = [params.u, params.v()];
    let acc = run_crude(params, cfg, 1, |s, out| {
        out[0] = if joint_indicator(s, order, levels) {
            1.0
        } else {
            0.0
        };
    })?;
    Ok(acc[0].estimate())
}

/// Crude estimates at several `(u, v)` pairs on common paths.
pub fn mc_ruin_levels(
    params: &ModelParams<f64>,
    levels: &[(f64, f64)],
    cfg: &MCConfig,
) -> Result<Vec<MCEstimate>> {
    check_params(params)?;
    if levels.is_empty() {
        return Ok(Vec::new());
    }
    let floor1 = levels.iter().map(|l| l.0).fold(f64::INFINITY, f64::min);
    let floor2 = levels.iter().map(|l| l.1).fold(f64::INFINITY, f64::min);
    let acc = run_crude(params, cfg, levels.len(), |s, out| {
        let m1 = s.grid_max(0, floor1);
        let m2 = if m1.is_some() {
            s.grid_max(1, floor2)
        } else {
            None
        };
        for (o, &(u, v)) in out.iter_mut().zip(levels) {
            // Below the floor the maximum is only known to be ≤ floor.
            let hit1 = u < 0.0 || m1.is_some_and(|m| m > u);
            let hit2 = v < 0.0 || m2.is_some_and(|m| m > v);
            *o = if hit1 && hit2 { 1.0 } else { 0.0 };
        }
    })?;
    Ok(acc.iter().map(Accumulator::estimate).collect())
}

/// Crude estimates at successive dyadic refinements of one set of paths.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionStudy {
    pub grid_points: Vec<usize>,
    pub estimates: Vec<MCEstimate>,
    /// Per-path extrapolation `p_K + (p_K − p_{K−1})/(√2 − 1)` of the two
    /// finest grids, which removes the leading `√h` bias term.
    pub extrapolated: MCEstimate,
}

pub fn resolution_study(
    params: &ModelParams<f64>,
    depths: &[u32],
    cfg: &MCConfig,
) -> Result<ResolutionStudy> {
    check_params(params)?;
    if depths.len() < 2 || depths.windows(2).any(|w| w[1] <= w[0]) {
        return invalid(
            "depths",
            depths.len() as f64,
            "need at least two increasing levels",
        );
    }
    let finest = *depths.last().unwrap();
    let run_cfg = MCConfig {
        grid_points: 1usize << finest,
        ..*cfg
    };
    let order = check_order(params);
    let levels = [params.u, params.v()];
    let k = depths.len();
    let gain = 1.0 / (std::f64::consts::SQRT_2 - 1.0);
    let acc = run_crude(params, &run_cfg, k + 1, |s, out| {
        for (o, &d) in out.iter_mut().zip(depths) {
            let hit = s.exceeds_at(order[0], levels[order[0]], d)
                && s.exceeds_at(order[1], levels[order[1]], d);
            *o = if hit { 1.0 } else { 0.0 };
        }
        out[k] = out[k - 1] + gain * (out[k - 1] - out[k - 2]);
    })?;
    Ok(ResolutionStudy {
        grid_points: depths.iter().map(|&d| 1usize << d).collect(),
        estimates: acc[..k].iter().map(Accumulator::estimate).collect(),
        extrapolated: acc[k].estimate(),
    })
}
