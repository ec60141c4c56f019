use crate::asymptotics::constants::{big_M, tau_constant};
use crate::asymptotics::optimizer::{lambdas, t_star};
use crate::asymptotics::regime::{classify_with, AaForm, Regime, DEFAULT_TOL};
use crate::error::{invalid, Result, RuinError};
use crate::exact::{single_ruin, ModelParams};
use crate::gauss::{biv_normal_log_pdf, cov_matrix, std_normal_cdf, Matrix2};
use crate::scalar::Real;

/// Closed forms for the regime IV/V constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstantsForm {
    /// `2a √(2π/τ) e^{M²/(2τ)} / (1 − 2aρ)` as usually stated. Falls short
    /// of simulated probabilities by a factor of about 2.7 at
    /// `(a, ρ) = (0.5, −0.9)`.
    Printed,
    /// Rebuilt from the local expansion of `q_a(1, ·)` around `t*`, whose
    /// second-order coefficient is `K = 2τ`:
    /// `2a/(t*(1 − 2aρ)) √(2π/K) e^{M²/(2K)}`. The extra `1/t*` is the
    /// per-unit-time crossing rate `a/t*` of the second coordinate.
    #[default]
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxOptions<T> {
    /// Pickands-type constant for regime I, normally estimated by simulation.
    pub c1_constant: Option<T>,
    pub aa_form: AaForm,
    pub tol: T,
    pub constants: ConstantsForm,
}

impl<T: Real> Default for ApproxOptions<T> {
    fn default() -> Self {
        Self {
            c1_constant: None,
            aa_form: AaForm::Derived,
            tol: T::lit(DEFAULT_TOL),
            constants: ConstantsForm::default(),
        }
    }
}

/// One `weight · φ_Σ(x, y)` factor of an approximant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityTerm<T> {
    pub weight: T,
    pub point: (T, T),
    pub sigma: Matrix2<T>,
}

/// `value = prefactor · u^{u_power} · Σ weight_i φ_{Σ_i}(point_i)`, or for the
/// dimension-reduction regimes `prefactor · π_1(c1; u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticApproximation<T> {
    pub regime: Regime,
    pub prefactor: T,
    pub u_power: i32,
    pub density_points: Vec<DensityTerm<T>>,
    pub value: T,
    /// Natural log of `value`, finite even where `value` underflows.
    pub log_value: T,
}

/// `√(2π/τ) Φ(M/√τ) e^{M²/(2τ)}`.
fn one_sided_factor<T: Real>(m: T, tau: T) -> T {
    let two_pi = T::PI() + T::PI();
    (two_pi / tau).sqrt() * std_normal_cdf(m / tau.sqrt()) * (m * m / (tau + tau)).exp()
}

/// Weight of one optimizer term in regimes IV and V, for the drift pair as
/// seen from that optimizer.
fn interior_constant<T: Real>(c1: T, c2: T, rho: T, a: T, form: ConstantsForm) -> Result<T> {
    let ts = t_star(rho, a)?;
    let tau = tau_constant(Regime::FullDimIV, rho, a)?;
    let m = big_M(c1, c2, ts, rho, a)?;
    let two_pi = T::PI() + T::PI();
    let slope = T::one() - (a + a) * rho;
    Ok(match form {
        ConstantsForm::Printed => {
            (a + a) * (two_pi / tau).sqrt() / slope * (m * m / (tau + tau)).exp()
        }
        ConstantsForm::Corrected => {
            let k = tau + tau;
            (a + a) / (ts * slope) * (two_pi / k).sqrt() * (m * m / (k + k)).exp()
        }
    })
}

/// Closed-form constant of regimes II to IV, and the pair of regime V.
pub fn full_dim_constants<T: Real>(
    regime: Regime,
    rho: T,
    a: T,
    c1: T,
    c2: T,
    form: ConstantsForm,
) -> Result<Vec<T>> {
    let one = T::one();
    match regime {
        Regime::FullDimII => {
            let tau = tau_constant(regime, rho, a)?;
            let (l1, _) = lambdas(rho, a)?;
            let m = big_M(c1, c2, one, rho, a)?;
            Ok(vec![(a + a) / l1 * one_sided_factor(m, tau)])
        }
        Regime::FullDimIII => {
            let tau = tau_constant(regime, rho, a)?;
            let m1 = big_M(c1, c2, one, rho, a)?;
            let m2 = big_M(c2, c1, one, rho, a)?;
            Ok(vec![one_sided_factor(m1, tau) + one_sided_factor(m2, tau)])
        }
        Regime::FullDimIV => Ok(vec![interior_constant(c1, c2, rho, a, form)?]),
        Regime::FullDimV => Ok(vec![
            interior_constant(c1, c2, rho, a, form)?,
            interior_constant(c2, c1, rho, a, form)?,
        ]),
        _ => Err(RuinError::Undefined("closed-form constant for this regime")),
    }
}

/// Asymptotic approximant of the joint ruin probability at capital `u`
/// (with `v = a u`) using default options.
pub fn approximant<T: Real>(
    params: &ModelParams<T>,
    regime: Regime,
    u: T,
    c1_constant: Option<T>,
) -> Result<AsymptoticApproximation<T>> {
    let opts = ApproxOptions {
        c1_constant,
        ..ApproxOptions::default()
    };
    approximant_with(params, regime, u, &opts)
}

pub fn approximant_with<T: Real>(
    params: &ModelParams<T>,
    regime: Regime,
    u: T,
    opts: &ApproxOptions<T>,
) -> Result<AsymptoticApproximation<T>> {
    params.validate()?;
    if !(u > T::zero() && u.is_finite()) {
        return invalid("u", u.as_f64(), "must be positive");
    }
    let a = params
        .a()
        .ok_or(RuinError::Undefined("ratio a (u must be positive)"))?;
    let (rho, c1, c2) = (params.rho, params.c1, params.c2);
    let found = classify_with(rho, a, opts.tol, opts.aa_form)?;
    if found != regime {
        return Err(RuinError::RegimeMismatch {
            regime: regime.to_string(),
            rho: rho.as_f64(),
            a: a.as_f64(),
        });
    }

    let one = T::one();
    if !regime.is_full_dimensional() {
        let base = single_ruin(c1, u, one)?;
        let prefactor = match regime {
            Regime::DimReductionStrict => one,
            _ => std_normal_cdf((rho * c1 - c2) / (one - rho * rho).sqrt()),
        };
        let value = prefactor * base;
        return Ok(AsymptoticApproximation {
            regime,
            prefactor,
            u_power: 0,
            density_points: Vec::new(),
            value,
            log_value: value.ln(),
        });
    }

    let unit = cov_matrix(one, one, rho)?;
    let at_unit = |weight: T| DensityTerm {
        weight,
        point: (u + c1, a * u + c2),
        sigma: unit,
    };
    let (prefactor, u_power, terms) = match regime {
        Regime::FullDimI => {
            let c = opts.c1_constant.ok_or(RuinError::MissingConstant)?;
            if !(c > T::zero() && c.is_finite()) {
                return invalid("c1_constant", c.as_f64(), "must be positive");
            }
            (c, -2, vec![at_unit(one)])
        }
        Regime::FullDimII | Regime::FullDimIII => {
            let c = full_dim_constants(regime, rho, a, c1, c2, opts.constants)?[0];
            (c, -1, vec![at_unit(one)])
        }
        Regime::FullDimIV => {
            let ts = t_star(rho, a)?;
            let c = full_dim_constants(regime, rho, a, c1, c2, opts.constants)?[0];
            let term = DensityTerm {
                weight: one,
                point: (u + c1, a * u + c2 * ts),
                sigma: cov_matrix(one, ts, rho)?,
            };
            (c, -1, vec![term])
        }
        Regime::FullDimV => {
            let ts = t_star(rho, a)?;
            let cs = full_dim_constants(regime, rho, a, c1, c2, opts.constants)?;
            let first = DensityTerm {
                weight: cs[0],
                point: (u + c1, u + c2 * ts),
                sigma: cov_matrix(one, ts, rho)?,
            };
            // Mirror image: W1 observed at t*, W2 at the horizon.
            let second = DensityTerm {
                weight: cs[1],
                point: (u + c1 * ts, u + c2),
                sigma: cov_matrix(ts, one, rho)?,
            };
            (one, -1, vec![first, second])
        }
        _ => unreachable!("dimension-reduction regimes handled above"),
    };

    let mut logs = Vec::with_capacity(terms.len());
    for term in &terms {
        let lp = biv_normal_log_pdf(term.point.0, term.point.1, &term.sigma)?;
        logs.push(term.weight.ln() + lp);
    }
    let top = logs.iter().copied().fold(T::neg_infinity(), T::max);
    let sum = logs.iter().fold(T::zero(), |acc, &l| acc + (l - top).exp());
    let log_value = prefactor.ln() + T::from_i32(u_power).unwrap() * u.ln() + top + sum.ln();
    if log_value.is_nan() {
        return Err(RuinError::Numeric {
            op: "approximant",
            detail: "log value is NaN".into(),
        });
    }
    Ok(AsymptoticApproximation {
        regime,
        prefactor,
        u_power,
        density_points: terms,
        value: log_value.exp(),
        log_value,
    })
}
