use std::time::Instant;

use ruin_core::asymptotics::{
    approximant_with, classify_with, critical_rho_with, AaForm, ApproxOptions, ConstantsForm,
    Regime,
};
use ruin_core::exact::{independent_ruin, ruin_bounds, ModelParams};
use ruin_core::montecarlo::{
    estimate_pickands_c1, mc_ruin, mc_ruin_importance, pickands_profile, MCConfig, MCEstimate,
};
use ruin_core::verify::{self, CriterionReport, VerifyOptions, VerifyReport};
use ruin_core::RuinError;

use crate::output::{Cell, Params, Record, Sink};
use crate::{
    Axis, Command, Estimator, Failure, Level, ModelArgs, OutputArgs, RegimeArgs, SamplingArgs,
    TiltArgs,
};

type Result<T> = std::result::Result<T, Failure>;

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Failure::Invalid(msg.into()))
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams<f64>> {
        let Some(u) = self.u else {
            return invalid("missing --u");
        };
        let Some(rho) = self.rho else {
            return invalid("missing --rho");
        };
        let p = match (self.v, self.a) {
            (Some(v), None) => ModelParams::with_levels(rho, self.c1, self.c2, u, v),
            (None, Some(a)) => ModelParams::with_ratio(rho, self.c1, self.c2, u, a),
            (Some(v), Some(a)) => {
                if (v - a * u).abs() > 1e-12 * v.abs().max(1.0) {
                    return invalid(format!("--v = {v} disagrees with --a {a} times --u {u}"));
                }
                ModelParams::with_ratio(rho, self.c1, self.c2, u, a)
            }
            (None, None) => return invalid("one of --v or --a is required"),
        }
        .horizon(self.horizon);
        p.validate()?;
        Ok(p)
    }
}

fn echo(p: &ModelParams<f64>) -> Params {
    Params {
        rho: Some(p.rho),
        a: p.a(),
        c1: Some(p.c1),
        c2: Some(p.c2),
        u: Some(p.u),
        v: Some(p.v()),
        horizon: Some(p.horizon),
        ..Params::default()
    }
}

impl RegimeArgs {
    fn aa_form(&self) -> AaForm {
        if self.paper_aa {
            AaForm::Printed
        } else {
            AaForm::Derived
        }
    }

    fn options(&self, c1_constant: Option<f64>) -> ApproxOptions<f64> {
        ApproxOptions {
            c1_constant,
            aa_form: self.aa_form(),
            tol: self.tol,
            constants: if self.printed_constants {
                ConstantsForm::Printed
            } else {
                ConstantsForm::Corrected
            },
        }
    }

    /// Regime of the normalized parameters, if `a` is admissible.
    fn regime_of(&self, p: &ModelParams<f64>) -> Option<Regime> {
        let a = p.normalized().a()?;
        classify_with(p.rho, a, self.tol, self.aa_form()).ok()
    }
}

impl SamplingArgs {
    fn config(&self, default_grid: usize) -> MCConfig {
        MCConfig {
            n_samples: self.n.unwrap_or(100_000),
            grid_points: self.grid.unwrap_or(default_grid),
            seed: self.seed,
            threads: self.threads,
            ..MCConfig::default()
        }
    }

    fn echo(&self, cfg: &MCConfig, mut p: Params) -> Params {
        p.n = Some(cfg.n_samples);
        p.grid = Some(cfg.grid_points);
        p.seed = Some(self.seed);
        p
    }
}

impl TiltArgs {
    fn tilt(&self) -> Option<(f64, f64)> {
        self.tilt_mu1.zip(self.tilt_mu2)
    }
}

/// Runs `f`, returning its value and the elapsed milliseconds.
fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

fn open(out: &OutputArgs) -> Result<Sink> {
    Ok(Sink::open(out.out.as_deref(), out.format, out.timing)?)
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Classify {
            rho,
            a,
            regimes,
            out,
        } => classify(rho, a, &regimes, &out),
        Command::Bounds { model, out } => bounds(&model, &out),
        Command::Approx {
            model,
            regimes,
            regime,
            c1_constant,
            delta,
            sampling,
            out,
        } => approx(
            &model,
            &regimes,
            regime.as_deref(),
            c1_constant,
            delta,
            &sampling,
            &out,
        ),
        Command::Simulate {
            model,
            sampling,
            tilt,
            regimes,
            out,
        } => simulate(&model, &sampling, &tilt, &regimes, &out),
        Command::Pickands {
            rho,
            a,
            delta,
            sampling,
            out,
        } => pickands(rho, a, &delta, &sampling, &out),
        Command::Sweep {
            axis,
            values,
            model,
            regimes,
            c1_constant,
            sampling,
            tilt,
            format,
            out,
        } => {
            let out = OutputArgs {
                format,
                out,
                timing: false,
            };
            sweep(
                axis,
                &values,
                &model,
                &regimes,
                c1_constant,
                &sampling,
                &tilt,
                &out,
            )
        }
        Command::Verify {
            level,
            seed,
            budget,
            threads,
            format,
            out,
        } => run_verify(level, seed, budget, threads, format, out),
    }
}

fn classify(rho: f64, a: f64, regimes: &RegimeArgs, out: &OutputArgs) -> Result<()> {
    let mut sink = open(out)?;
    let (found, ms) = timed(|| -> Result<_> {
        Ok((
            classify_with(rho, a, regimes.tol, regimes.aa_form())?,
            critical_rho_with(a, regimes.aa_form())?,
        ))
    });
    let (regime, crit) = found?;
    let mut rec = Record::new(
        "classify",
        "critical_rho",
        Params {
            rho: Some(rho),
            a: Some(a),
            ..Params::default()
        },
    );
    rec.regime = Some(regime.to_string());
    rec.value = Some(crit);
    rec.wall_time_ms = Some(ms);
    sink.write(&rec)?;
    Ok(sink.finish()?)
}

fn bounds(model: &ModelArgs, out: &OutputArgs) -> Result<()> {
    let p = model.params()?;
    let mut sink = open(out)?;
    let rec = if p.rho == 0.0 {
        let n = p.normalized();
        let (value, ms) = timed(|| independent_ruin(n.c1, n.c2, n.u, n.v()));
        let mut rec = Record::new("bounds", "ruin_probability_exact", echo(&p));
        let value = value?;
        rec.value = Some(value);
        rec.lower = Some(value);
        rec.upper = Some(value);
        rec.wall_time_ms = Some(ms);
        rec
    } else {
        let (b, ms) = timed(|| ruin_bounds(&p));
        let b = b?;
        let mut rec = Record::new("bounds", "ruin_probability_bounds", echo(&p));
        rec.lower = Some(b.lower);
        rec.upper = Some(b.upper);
        rec.amplification = Some(b.amplification);
        rec.wall_time_ms = Some(ms);
        rec
    };
    sink.write(&rec)?;
    Ok(sink.finish()?)
}

/// The C1 constant estimated over `[0, delta]²`.
fn pickands_record(p: &ModelParams<f64>, delta: f64, sampling: &SamplingArgs) -> Result<Record> {
    let cfg = sampling.config(4096);
    let a = p.normalized().a().unwrap_or(f64::NAN);
    let (est, ms) = timed(|| estimate_pickands_c1(p.rho, a, delta, &cfg));
    let est = est?;
    let mut params = sampling.echo(
        &cfg,
        Params {
            rho: Some(p.rho),
            a: Some(a),
            ..Params::default()
        },
    );
    params.delta = Some(delta);
    let mut rec = Record::new("approx", "pickands_c1", params);
    rec.value = Some(est.mean);
    rec.std_error = Some(est.std_error);
    rec.wall_time_ms = Some(ms);
    Ok(rec)
}

fn approx(
    model: &ModelArgs,
    regimes: &RegimeArgs,
    regime: Option<&str>,
    c1_constant: Option<f64>,
    delta: f64,
    sampling: &SamplingArgs,
    out: &OutputArgs,
) -> Result<()> {
    let p = model.params()?;
    let n = p.normalized();
    let Some(a) = n.a() else {
        return invalid("--u must be positive for an asymptotic approximation");
    };
    let found = classify_with(p.rho, a, regimes.tol, regimes.aa_form())?;
    let regime = match regime {
        Some(name) => name
            .parse::<Regime>()
            .map_err(|e| Failure::Invalid(format!("--regime: {e}")))?,
        None => found,
    };
    let mut sink = open(out)?;
    let mut constant = c1_constant;
    if regime == Regime::FullDimI && found == Regime::FullDimI && constant.is_none() {
        let rec = pickands_record(&p, delta, sampling)?;
        constant = rec.value;
        sink.write(&rec)?;
    }
    let opts = regimes.options(constant);
    let (r, ms) = timed(|| {
        approximant_with(
            &ModelParams::with_ratio(n.rho, n.c1, n.c2, n.u, a),
            regime,
            n.u,
            &opts,
        )
    });
    let r = r?;
    for (quantity, value) in [
        ("asymptotic_approximation", r.value),
        ("asymptotic_log_value", r.log_value),
    ] {
        let mut rec = Record::new("approx", quantity, echo(&p));
        rec.regime = Some(r.regime.to_string());
        rec.value = Some(value);
        rec.wall_time_ms = Some(ms);
        sink.write(&rec)?;
    }
    Ok(sink.finish()?)
}

/// Runs the chosen estimator; the flag says whether the mean is
/// likelihood-ratio weighted.
fn estimate(
    p: &ModelParams<f64>,
    cfg: &MCConfig,
    estimator: Estimator,
) -> std::result::Result<MCEstimate, RuinError> {
    let n = p.normalized();
    match estimator {
        Estimator::Crude => mc_ruin(&n, cfg),
        Estimator::Importance => mc_ruin_importance(&n, cfg),
    }
}

fn simulate(
    model: &ModelArgs,
    sampling: &SamplingArgs,
    tilt: &TiltArgs,
    regimes: &RegimeArgs,
    out: &OutputArgs,
) -> Result<()> {
    let p = model.params()?;
    let mut cfg = sampling.config(1 << 14);
    cfg.validate()?;
    let estimator = match (tilt.estimator, tilt.tilt()) {
        (Some(Estimator::Crude), Some(_)) => {
            return invalid("--tilt-mu1/--tilt-mu2 need --estimator importance")
        }
        (Some(e), _) => e,
        (None, Some(_)) => Estimator::Importance,
        (None, None) => Estimator::Crude,
    };
    if estimator == Estimator::Importance {
        cfg.tilt = tilt.tilt();
    }
    let mut sink = open(out)?;
    let (est, ms) = timed(|| estimate(&p, &cfg, estimator));
    let est = est?;
    let mut params = sampling.echo(&cfg, echo(&p));
    params.tilt_mu1 = tilt.tilt_mu1;
    params.tilt_mu2 = tilt.tilt_mu2;
    let quantity = match estimator {
        Estimator::Crude => "ruin_probability_mc",
        Estimator::Importance => "is_weighted_mean",
    };
    let mut rec = Record::new("simulate", quantity, params);
    rec.regime = regimes.regime_of(&p).map(|r| r.to_string());
    rec.value = Some(est.mean);
    rec.std_error = Some(est.std_error);
    rec.wall_time_ms = Some(ms);
    sink.write(&rec)?;
    Ok(sink.finish()?)
}

fn pickands(
    rho: f64,
    a: f64,
    deltas: &[f64],
    sampling: &SamplingArgs,
    out: &OutputArgs,
) -> Result<()> {
    let cfg = sampling.config(4096);
    let mut sink = open(out)?;
    let (ests, ms) = timed(|| pickands_profile(rho, a, deltas, &cfg));
    for (&delta, est) in deltas.iter().zip(ests?) {
        let mut params = sampling.echo(
            &cfg,
            Params {
                rho: Some(rho),
                a: Some(a),
                ..Params::default()
            },
        );
        params.delta = Some(delta);
        let mut rec = Record::new("pickands", "pickands_c1", params);
        rec.value = Some(est.mean);
        rec.std_error = Some(est.std_error);
        rec.wall_time_ms = Some(ms);
        sink.write(&rec)?;
    }
    Ok(sink.finish()?)
}

const SWEEP_COLUMNS: [&str; 8] = [
    "axis_value",
    "regime",
    "exact_or_bound_lower",
    "bound_upper",
    "asymptotic_value",
    "mc_mean",
    "mc_se",
    "ratio_mc_over_asymptotic",
];

fn check_axis(axis: Axis, values: &[f64]) -> Result<()> {
    let up = values.windows(2).all(|w| w[1] > w[0]);
    let down = values.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return invalid("--values must be strictly monotone");
    }
    for &x in values {
        let ok = match axis {
            Axis::U => x >= 0.0 && x.is_finite(),
            Axis::Rho => x.abs() < 1.0,
            Axis::A => x > 0.0 && x <= 1.0,
        };
        if !ok {
            return invalid(format!("--values entry {x} is not admissible for the axis"));
        }
    }
    Ok(())
}

/// Base parameters with the swept coordinate set to `x`.
fn sweep_point(axis: Axis, x: f64, model: &ModelArgs) -> Result<ModelParams<f64>> {
    let mut m = model.clone();
    match axis {
        Axis::U => {
            m.u = Some(x);
            if m.a.is_some() {
                m.v = None;
            }
        }
        Axis::Rho => m.rho = Some(x),
        Axis::A => {
            m.a = Some(x);
            m.v = None;
        }
    }
    m.params()
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    axis: Axis,
    values: &[f64],
    model: &ModelArgs,
    regimes: &RegimeArgs,
    c1_constant: Option<f64>,
    sampling: &SamplingArgs,
    tilt: &TiltArgs,
    out: &OutputArgs,
) -> Result<()> {
    check_axis(axis, values)?;
    let cfg = sampling.config(1 << 14);
    let simulate = cfg.n_samples > 0;
    if simulate {
        cfg.validate()?;
    }
    if tilt.estimator == Some(Estimator::Crude) && tilt.tilt().is_some() {
        return invalid("--tilt-mu1/--tilt-mu2 need --estimator importance");
    }
    let opts = regimes.options(c1_constant);
    let mut rows = Vec::with_capacity(values.len());
    for &x in values {
        let p = sweep_point(axis, x, model)?;
        let n = p.normalized();
        let regime = regimes.regime_of(&p);

        let (lower, upper) = if n.rho == 0.0 && n.u >= 0.0 && n.v() >= 0.0 {
            let e = independent_ruin(n.c1, n.c2, n.u, n.v())?;
            (Some(e), Some(e))
        } else if n.rho > 0.0 && n.u >= 0.0 && n.v() >= 0.0 {
            let b = ruin_bounds(&n)?;
            (Some(b.lower), Some(b.upper))
        } else {
            (None, None)
        };

        let asymptotic = match (regime, n.a()) {
            (Some(r), Some(a)) if n.u > 0.0 => {
                match approximant_with(
                    &ModelParams::with_ratio(n.rho, n.c1, n.c2, n.u, a),
                    r,
                    n.u,
                    &opts,
                ) {
                    Ok(v) => Some(v.value),
                    Err(RuinError::MissingConstant) => None,
                    Err(e) => return Err(e.into()),
                }
            }
            _ => None,
        };

        let mc = if simulate {
            let full_dim = regime.is_some_and(|r| r.is_full_dimensional());
            let estimator = tilt
                .estimator
                .unwrap_or(if tilt.tilt().is_some() || full_dim {
                    Estimator::Importance
                } else {
                    Estimator::Crude
                });
            let c = MCConfig {
                tilt: if estimator == Estimator::Importance {
                    tilt.tilt()
                } else {
                    None
                },
                ..cfg
            };
            Some(estimate(&p, &c, estimator)?)
        } else {
            None
        };
        let ratio = match (mc, asymptotic) {
            (Some(m), Some(v)) if v > 0.0 => Some(m.mean / v),
            _ => None,
        };
        rows.push(vec![
            Cell::Real(Some(x)),
            Cell::Text(regime.map(|r| r.to_string()).unwrap_or_default()),
            Cell::Real(lower),
            Cell::Real(upper),
            Cell::Real(asymptotic),
            Cell::Real(mc.map(|m| m.mean)),
            Cell::Real(mc.map(|m| m.std_error)),
            Cell::Real(ratio),
        ]);
    }
    let mut sink = open(out)?;
    sink.table(&SWEEP_COLUMNS, &rows)?;
    Ok(sink.finish()?)
}

fn run_verify(
    level: Level,
    seed: u64,
    budget: f64,
    threads: Option<usize>,
    format: Option<crate::output::Format>,
    out: Option<std::path::PathBuf>,
) -> Result<()> {
    if !(budget > 0.0 && budget.is_finite()) {
        return invalid(format!("invalid --budget = {budget}: must be positive"));
    }
    let opts = VerifyOptions {
        seed,
        threads,
        budget,
        ..VerifyOptions::default()
    };
    let ids: &[u32] = match level {
        Level::Quick => &verify::QUICK,
        Level::Full => &verify::FULL,
    };
    let mut sink = Sink::open(
        out.as_deref(),
        format.unwrap_or(crate::output::Format::Json),
        false,
    )?;
    let mut done: Vec<CriterionReport> = Vec::with_capacity(ids.len());
    for &id in ids {
        let report = verify::criterion(id, &opts);
        match format {
            None => {
                sink.text(&report.line())?;
                sink.text("\n")?;
                sink.flush()?;
            }
            Some(_) => {
                let rows = [vec![
                    Cell::Int(Some(u64::from(report.id))),
                    Cell::Text(report.name.to_string()),
                    Cell::Text(if report.passed { "pass" } else { "fail" }.to_string()),
                    Cell::Text(report.detail.clone()),
                ]];
                sink.table_rows(&["id", "name", "status", "detail"], &rows, done.is_empty())?;
            }
        }
        done.push(report);
    }
    let report = VerifyReport { criteria: done };
    if format.is_none() {
        let rendered = report.render();
        sink.text(rendered.lines().last().unwrap_or_default())?;
        sink.text("\n")?;
    }
    sink.finish()?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}
