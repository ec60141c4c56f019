//! Importance sampling of the joint ruin event.
//!
//! Paths are generated forward over a coarse grid whose cells are refined
//! lazily with the same node-keyed bridges as the crude sampler, so the
//! fine grid and its indicator are those of the crude estimator. The drift
//! of each coarse cell is chosen from the path observed so far:
//!
//! * while neither coordinate has crossed, it follows a deterministic
//!   schedule aimed at the most likely crossing times;
//! * once one coordinate has crossed, only the other is pushed, straight at
//!   its level from where it stands;
//! * once both have crossed, the drift is switched off.
//!
//! Stopping the drift at the crossings keeps the likelihood ratio from
//! depending on what the path does afterwards, which is where a fixed tilt
//! loses its efficiency. A user-supplied constant tilt is applied over the
//! whole horizon without adaptation.

use rand::RngCore;

use crate::asymptotics::minimize_q;
use crate::error::{Result, RuinError};
use crate::exact::ModelParams;
use crate::gauss::{cov_matrix, quadratic_form_q};
use crate::montecarlo::bridge::{LinearShift, PathModel, Shift, Walker};
use crate::montecarlo::drift::DriftSchedule;
use crate::montecarlo::estimate::{Accumulator, MCEstimate};
use crate::montecarlo::path::sample_drivers;
use crate::montecarlo::rng::{key_from_seed, stream_rng};
use crate::montecarlo::ruin::{base_model, check_order, check_params, run_chunks, MCConfig};

/// Finest level of the coarse grid on which the drift may change.
const COARSE_LEVEL: u32 = 8;

/// Drift of the drivers that turns `(W1, W2)` into `(W1 + μ1 t, W2 + μ2 t)`.
pub fn user_tilt(rho: f64, mu1: f64, mu2: f64, horizon: f64) -> DriftSchedule {
    let sigma = (1.0 - rho * rho).sqrt();
    DriftSchedule::constant(horizon, mu1, (mu2 - rho * mu1) / sigma)
}

/// Deterministic part of one mixture component: the schedule followed
/// before any crossing, the times it aims the two coordinates at, and its
/// mixture weight.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltComponent {
    pub schedule: DriftSchedule,
    pub targets: [f64; 2],
    pub weight: f64,
}

/// Offsets, in standard deviations, at which an interior crossing time is
/// targeted, with their relative weights.
const SPREAD: [(f64, f64); 5] = [
    (-2.0, 0.135),
    (-1.0, 0.607),
    (0.0, 1.0),
    (1.0, 0.607),
    (2.0, 0.135),
];

/// Curvature of `q` along coordinate `which` at `(s, t)`.
fn curvature(s: f64, t: f64, rho: f64, a: f64, which: usize) -> Result<f64> {
    let h = 1e-4 * if which == 0 { s } else { t };
    let at = |d: f64| {
        if which == 0 {
            quadratic_form_q(s + d, t, rho, a)
        } else {
            quadratic_form_q(s, t + d, rho, a)
        }
    };
    Ok((at(h)? - 2.0 * at(0.0)? + at(-h)?) / (h * h))
}

/// Schedule for the target `W1(s) = u + c1 s, W2(t) = v + c2 t` in the
/// normalized frame.
fn steer(p: &ModelParams<f64>, s: f64, t: f64, horizon: f64) -> Result<DriftSchedule> {
    let rho = p.rho;
    let sigma = (1.0 - rho * rho).sqrt();
    let scale = horizon.sqrt();
    let x = p.u + p.c1 * s;
    let y = p.v() + p.c2 * t;
    let (b1, b2) = cov_matrix(s, t, rho)?.inverse()?.mul_vec(x, y);
    let mut cuts: Vec<f64> = [s, t].into_iter().filter(|&r| r < 1.0).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.push(1.0);
    let mut segs = Vec::with_capacity(cuts.len());
    let mut start = 0.0;
    for end in cuts {
        let r = 0.5 * (start + end);
        let on1 = if r < s { b1 } else { 0.0 };
        let on2 = if r < t { b2 } else { 0.0 };
        segs.push((
            end * horizon,
            (on1 + rho * on2) / scale,
            sigma * on2 / scale,
        ));
        start = end;
    }
    Ok(DriftSchedule::new(segs))
}

/// Mixture components around each optimizer point. A crossing time inside
/// the horizon is spread over the width of the Laplace peak of
/// `exp(−u² q / 2)` along that coordinate, about `√(2/q'')/u`.
fn auto_components(params: &ModelParams<f64>) -> Result<Vec<TiltComponent>> {
    check_params(params)?;
    let horizon = params.horizon;
    let p = params.normalized();
    let (u, v, rho) = (p.u, p.v(), p.rho);
    if !(u > 0.0 && v > 0.0) {
        return Err(RuinError::Undefined(
            "automatic tilt (needs positive capitals; pass an explicit tilt)",
        ));
    }
    let ratio = v / u;
    let swapped = ratio > 1.0;
    let a = if swapped { 1.0 / ratio } else { ratio };
    let big = u.max(v);
    let opt = minimize_q(rho, a).map_err(|_| {
        RuinError::Undefined(
            "automatic tilt (needs a full-dimensional regime; pass an explicit tilt)",
        )
    })?;
    let share = 1.0 / opt.points.len() as f64;
    let mut out = Vec::new();
    for &(s0, t0) in &opt.points {
        // Candidate times per coordinate of the optimizer's own frame.
        let mut axes: [Vec<(f64, f64)>; 2] = [vec![(s0, 1.0)], vec![(t0, 1.0)]];
        for (which, centre) in [(0, s0), (1, t0)] {
            if centre >= 1.0 {
                continue;
            }
            let sd = (2.0 / curvature(s0, t0, rho, a, which)?).sqrt() / big;
            let pts: Vec<(f64, f64)> = SPREAD
                .iter()
                .map(|&(k, w)| (centre + k * sd, w))
                .filter(|&(r, _)| r > 0.0 && r < 1.0)
                .collect();
            let total: f64 = pts.iter().map(|q| q.1).sum();
            axes[which] = pts.into_iter().map(|(r, w)| (r, w / total)).collect();
        }
        for &(sa, wa) in &axes[0] {
            for &(tb, wb) in &axes[1] {
                let (s, t) = if swapped { (tb, sa) } else { (sa, tb) };
                out.push(TiltComponent {
                    schedule: steer(&p, s, t, horizon)?,
                    targets: [s * horizon, t * horizon],
                    weight: share * wa * wb,
                });
            }
        }
    }
    Ok(out)
}

/// Minimal-energy drifts steering the mean path to `(u + c1 s, v + c2 t)`
/// for `(s, t)` at and around each optimizer `(s*, t*)`.
///
/// For the target `W1(s*) = x, W2(t*) = y` the conditional mean path has
/// driver drift `θ1 = b1 1{r<s*} + ρ b2 1{r<t*}`, `θ2 = √(1−ρ²) b2 1{r<t*}`
/// with `b = Σ_{s*,t*}⁻¹ (x, y)`; with `s* = t* = 1` this is a constant drift.
pub fn auto_tilt(params: &ModelParams<f64>) -> Result<Vec<DriftSchedule>> {
    Ok(auto_components(params)?
        .into_iter()
        .map(|c| c.schedule)
        .collect())
}

/// The sampling measure: a mixture of components.
struct Plan {
    comps: Vec<TiltComponent>,
    log_weights: Vec<f64>,
    adaptive: bool,
    rho: f64,
    sigma: f64,
    c: [f64; 2],
    levels: [f64; 2],
    horizon: f64,
}

impl Plan {
    fn new(params: &ModelParams<f64>, cfg: &MCConfig, cell: f64) -> Result<Self> {
        let (comps, adaptive) = match cfg.tilt {
            Some((mu1, mu2)) => (
                vec![TiltComponent {
                    schedule: user_tilt(params.rho, mu1, mu2, params.horizon),
                    targets: [params.horizon; 2],
                    weight: 1.0,
                }],
                false,
            ),
            None => {
                let comps = auto_components(params)?
                    .into_iter()
                    .map(|c| TiltComponent {
                        schedule: c.schedule.snapped(cell),
                        ..c
                    })
                    .collect();
                (comps, true)
            }
        };
        Ok(Self {
            log_weights: comps.iter().map(|c| c.weight.ln()).collect(),
            comps,
            adaptive,
            rho: params.rho,
            sigma: (1.0 - params.rho * params.rho).sqrt(),
            c: [params.c1, params.c2],
            levels: [params.u, params.v()],
            horizon: params.horizon,
        })
    }

    fn is_null(&self) -> bool {
        self.comps.iter().all(|c| c.schedule.is_null())
    }

    /// Driver drift of component `j` on the cell starting at `t`, given the
    /// coordinate values there and which coordinates have crossed.
    fn theta(&self, j: usize, t: f64, x: [f64; 2], crossed: [bool; 2], cell: f64) -> (f64, f64) {
        if !self.adaptive || !(crossed[0] || crossed[1]) {
            return self.comps[j].schedule.at(t);
        }
        if crossed[0] && crossed[1] {
            return (0.0, 0.0);
        }
        let i = if crossed[0] { 1 } else { 0 };
        let target = self.comps[j].targets[i];
        let end = if target - t >= cell {
            target
        } else {
            self.horizon
        };
        let mu = self.c[i] + (self.levels[i] - x[i]) / (end - t).max(cell);
        if i == 0 {
            (mu, 0.0)
        } else {
            (self.rho * mu, self.sigma * mu)
        }
    }
}

/// Undrifted drivers at the coarse nodes of one path, with lazy access to
/// the fine grid inside each cell when the grid is dyadic.
#[allow(clippy::large_enum_variant)] // one per path, never moved
enum Source<'m> {
    Dyadic {
        walker: Walker<'m>,
        depth: u32,
        coarse: u32,
        nodes: Vec<(f64, f64)>,
    },
    Sequential {
        key: [u8; 32],
        steps: usize,
        nodes: Vec<(f64, f64)>,
    },
}

impl<'m> Source<'m> {
    fn new(model: &'m PathModel, key: [u8; 32], steps: usize) -> Self {
        if steps.is_power_of_two() {
            let depth = steps.trailing_zeros();
            Source::Dyadic {
                walker: Walker::new(model, &key),
                depth,
                coarse: depth.min(COARSE_LEVEL),
                nodes: Vec::new(),
            }
        } else {
            Source::Sequential {
                key,
                steps,
                nodes: Vec::new(),
            }
        }
    }

    fn start(&mut self, path: u64, horizon: f64) {
        match self {
            Source::Dyadic {
                walker,
                coarse,
                nodes,
                ..
            } => {
                walker.start(2 * path);
                *nodes = walker.full_grid(*coarse);
            }
            Source::Sequential { key, steps, nodes } => {
                let mut rng = stream_rng(key, 2 * path);
                *nodes = sample_drivers(*steps, horizon, &mut rng);
            }
        }
    }

    fn nodes(&self) -> &[(f64, f64)] {
        match self {
            Source::Dyadic { nodes, .. } | Source::Sequential { nodes, .. } => nodes,
        }
    }

    /// Whether coordinate `coord` exceeds `level` at a fine node inside
    /// cell `k` or at its right end.
    fn cell_exceeds(
        &mut self,
        coord: usize,
        level: f64,
        k: usize,
        end: (f64, [f64; 2]),
        shift: &LinearShift,
    ) -> bool {
        match self {
            Source::Dyadic {
                walker,
                depth,
                coarse,
                nodes,
            } => {
                let (left, right) = (nodes[k], nodes[k + 1]);
                walker.cell_exceeds(coord, level, *depth, *coarse, k as u64, left, right, shift)
            }
            Source::Sequential { .. } => end.1[coord] + shift.shift(coord, end.0) > level,
        }
    }
}

/// Per-chunk state of the importance sampler.
struct Tilted<'m> {
    plan: &'m Plan,
    model: &'m PathModel,
    key: [u8; 32],
    source: Source<'m>,
    log_dens: Vec<f64>,
}

impl<'m> Tilted<'m> {
    fn pick(&self, path: u64) -> usize {
        let n = self.plan.comps.len();
        if n == 1 {
            return 0;
        }
        let mut aux = stream_rng(&self.key, 2 * path + 1);
        let x = (aux.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let mut acc = 0.0;
        for (j, c) in self.plan.comps.iter().enumerate() {
            acc += c.weight;
            if x < acc {
                return j;
            }
        }
        n - 1
    }

    /// Simulates one path; returns the joint indicator and `dP/dQ`.
    fn run(&mut self, path: u64, order: [usize; 2]) -> (bool, f64) {
        let plan = self.plan;
        let m = self.model;
        let current = self.pick(path);
        self.source.start(path, plan.horizon);
        let cells = self.source.nodes().len() - 1;
        let h = plan.horizon / cells as f64;
        let mut crossed = [plan.levels[0] < 0.0, plan.levels[1] < 0.0];
        let mut drift = (0.0, 0.0);
        self.log_dens.iter_mut().for_each(|l| *l = 0.0);
        for k in 0..cells {
            if plan.adaptive && crossed[0] && crossed[1] {
                break;
            }
            let t = k as f64 * h;
            let (a, b) = (self.source.nodes()[k], self.source.nodes()[k + 1]);
            let start = (a.0 + drift.0, a.1 + drift.1);
            let x = [
                m.noise(0, start.0, start.1) - plan.c[0] * t,
                m.noise(1, start.0, start.1) - plan.c[1] * t,
            ];
            let theta = plan.theta(current, t, x, crossed, h);
            let next = (drift.0 + theta.0 * h, drift.1 + theta.1 * h);
            let d = (b.0 + next.0 - start.0, b.1 + next.1 - start.1);
            for (j, l) in self.log_dens.iter_mut().enumerate() {
                let th = if j == current {
                    theta
                } else {
                    plan.theta(j, t, x, crossed, h)
                };
                *l += th.0 * d.0 + th.1 * d.1 - 0.5 * (th.0 * th.0 + th.1 * th.1) * h;
            }
            let shift = LinearShift {
                t0: t,
                at_t0: [
                    m.noise(0, drift.0, drift.1) - plan.c[0] * t,
                    m.noise(1, drift.0, drift.1) - plan.c[1] * t,
                ],
                slope: [
                    m.noise(0, theta.0, theta.1) - plan.c[0],
                    m.noise(1, theta.0, theta.1) - plan.c[1],
                ],
            };
            let end = (t + h, [m.noise(0, b.0, b.1), m.noise(1, b.0, b.1)]);
            for &i in &order {
                if !crossed[i] && self.source.cell_exceeds(i, plan.levels[i], k, end, &shift) {
                    crossed[i] = true;
                }
            }
            drift = next;
        }
        for (l, w) in self.log_dens.iter_mut().zip(&plan.log_weights) {
            *l += w;
        }
        let top = self
            .log_dens
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = self.log_dens.iter().map(|l| (l - top).exp()).sum();
        let lr = (-(top + sum.ln())).exp();
        (crossed[0] && crossed[1], lr)
    }
}

fn run_tilted<F>(params: &ModelParams<f64>, cfg: &MCConfig, per_path: F) -> Result<Accumulator>
where
    F: Fn(bool, f64) -> f64 + Sync,
{
    check_params(params)?;
    cfg.validate()?;
    let cells = cfg
        .dyadic_depth()
        .map_or(cfg.grid_points, |d| 1usize << d.min(COARSE_LEVEL));
    let plan = Plan::new(params, cfg, params.horizon / cells as f64)?;
    let model = base_model(params, cfg);
    let key = key_from_seed(cfg.seed);
    let order = check_order(params);
    let null = plan.is_null();
    let acc = run_chunks(
        cfg,
        1,
        || Tilted {
            plan: &plan,
            model: &model,
            key,
            source: Source::new(&model, key, cfg.grid_points),
            log_dens: vec![0.0; plan.comps.len()],
        },
        |s, path, out| {
            let (hit, lr) = s.run(path, order);
            out[0] = per_path(hit, if null { 1.0 } else { lr });
        },
    )?;
    Ok(acc.into_iter().next().unwrap())
}

/// Importance-sampled estimate: paths drawn under the tilted measure (the
/// user's constant drift, or else a weighted mixture of drifts aimed at and
/// around the optimizers), weighted by the exact likelihood ratio. Returns the plain sample mean of `1{ruin} · dP/dQ`
/// and its sample standard error.
pub fn mc_ruin_importance(params: &ModelParams<f64>, cfg: &MCConfig) -> Result<MCEstimate> {
    Ok(run_tilted(params, cfg, |hit, lr| if hit { lr } else { 0.0 })?.estimate())
}

/// Mean likelihood ratio of the importance sampler without any indicator.
/// Its expectation is one. Under the strong automatic tilt the ratio is
/// heavily skewed, and finite samples usually fall well short of one.
pub fn mc_likelihood_ratio_mean(params: &ModelParams<f64>, cfg: &MCConfig) -> Result<MCEstimate> {
    Ok(run_tilted(params, cfg, |_, lr| lr)?.estimate())
}
