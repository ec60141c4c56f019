use proptest::prelude::*;
use ruin_core::asymptotics::*;
use ruin_core::exact::{single_ruin, ModelParams};
use ruin_core::gauss::quadratic_form_q;
use ruin_core::RuinError;

const TOL: f64 = DEFAULT_TOL;

type M2 = [[f64; 2]; 2];

fn sigma(s: f64, t: f64, rho: f64) -> M2 {
    [[s, rho * s.min(t)], [rho * s.min(t), t]]
}

fn inv(m: M2) -> M2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ]
}

fn mul(a: M2, b: M2) -> M2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn form(x: [f64; 2], m: M2, y: [f64; 2]) -> f64 {
    (0..2)
        .map(|i| (0..2).map(|j| x[i] * m[i][j] * y[j]).sum::<f64>())
        .sum()
}

/// Finite-`u` exponent correction at the cell `(1, t − δ/u²)` with `δ = (l−1)Δ`,
/// divided by `δ/u`. Its limit is the linear drift coefficient `M`.
fn s_ratio(c1: f64, c2: f64, t: f64, rho: f64, a: f64, u: f64, delta: f64) -> f64 {
    let step = delta / (u * u);
    let lt = t - step;
    let (near, far) = (sigma(1.0, lt, rho), sigma(1.0, t, rho));
    // A⁻¹ − B⁻¹ = A⁻¹ (B − A) B⁻¹, free of cancellation.
    let diff_sigma = [[0.0, rho * step], [rho * step, step]];
    let diff = mul(mul(inv(near), diff_sigma), inv(far));
    let first = -form([c1, c2], diff, [u + c1, a * u + c2]);
    let second = form(
        [0.0, c2 * delta / (u * u)],
        inv(far),
        [u + c1, a * u + c2 * lt],
    );
    (first + second) * u / delta
}

#[test]
fn m_is_the_limit_of_the_local_exponent() {
    for (c1, c2, t, rho, a) in [
        (0.5, 0.5, 0.29, -0.9, 0.5),
        (-1.0, 2.0, 0.7, 0.3, 0.8),
        (1.5, -0.4, 1.0, -0.5, 1.0),
        (0.2, 1.1, 0.45, -0.7, 0.6),
    ] {
        let m = big_M(c1, c2, t, rho, a).unwrap();
        // The error is O(1/u); one Richardson step removes it.
        let oracle =
            2.0 * s_ratio(c1, c2, t, rho, a, 2e5, 1.0) - s_ratio(c1, c2, t, rho, a, 1e5, 1.0);
        assert!(
            (m - oracle).abs() < 1e-7 * m.abs().max(1.0),
            "{m} vs {oracle}"
        );
    }
}

#[test]
fn tau_at_the_symmetric_boundary() {
    let t = tau_constant(Regime::FullDimIII, -0.5_f64, 1.0).unwrap();
    assert!((t - 4.0 / 3.0).abs() < 1e-12);
    // The generic boundary formula reduces to the same value.
    let t2 = tau_constant(Regime::FullDimII, -0.5_f64, 1.0).unwrap();
    assert!((t2 - 4.0 / 3.0).abs() < 1e-12);
    assert!(matches!(
        tau_constant(Regime::DimReductionStrict, 0.5_f64, 0.3),
        Err(RuinError::Undefined(_))
    ));
}

#[test]
fn classification_examples() {
    assert_eq!(classify(-0.5, 1.0, TOL).unwrap(), Regime::FullDimIII);
    assert_eq!(classify(-0.9, 0.5, TOL).unwrap(), Regime::FullDimIV);
    assert_eq!(classify(-0.9, 1.0, TOL).unwrap(), Regime::FullDimV);
    assert_eq!(classify(0.2, 0.5, TOL).unwrap(), Regime::FullDimI);
    assert_eq!(classify(0.6, 0.5, TOL).unwrap(), Regime::DimReductionStrict);
    assert_eq!(classify(0.5, 0.5, TOL).unwrap(), Regime::DimReductionEqual);
    let crit = critical_rho(0.5_f64).unwrap();
    assert!((crit + 0.366_025_403_784_438_6).abs() < 1e-15);
    assert_eq!(classify(crit, 0.5, TOL).unwrap(), Regime::FullDimII);
    let ts = t_star(-0.9_f64, 0.5).unwrap();
    assert!((ts - 0.5 / (0.9 * 1.9)).abs() < 1e-15);
}

#[test]
fn classification_rejects_inadmissible_input() {
    assert!(classify(-1.0, 0.5, TOL).is_err());
    assert!(classify(0.2, 0.0, TOL).is_err());
    assert!(classify(0.2, 1.2, TOL).is_err());
    assert!(classify(f64::NAN, 0.5, TOL).is_err());
}

#[test]
fn boundary_is_crossed_through_the_boundary_tag() {
    let tol = 1e-6;
    for a in [0.2_f64, 0.5, 0.9] {
        let crit = critical_rho(a).unwrap();
        assert_eq!(
            classify(crit + 2.0 * tol, a, tol).unwrap(),
            Regime::FullDimI
        );
        assert_eq!(classify(crit, a, tol).unwrap(), Regime::FullDimII);
        assert_eq!(
            classify(crit - 2.0 * tol, a, tol).unwrap(),
            Regime::FullDimIV
        );
    }
    assert_eq!(
        classify(-0.5 + 2.0 * tol, 1.0, tol).unwrap(),
        Regime::FullDimI
    );
    assert_eq!(
        classify(-0.5 - 2.0 * tol, 1.0, tol).unwrap(),
        Regime::FullDimV
    );
}

/// Golden-section minimizer of `q_a(1, ·)` on `[lo, hi]`.
fn golden(rho: f64, a: f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5.0_f64.sqrt() - 1.0) / 2.0;
    let f = |t: f64| quadratic_form_q(1.0, t, rho, a).unwrap();
    while hi - lo > 1e-12 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn interior_optimizer_matches_line_search() {
    for (rho, a) in [(-0.9, 0.5), (-0.5, 0.3), (-0.95, 0.9), (-0.6, 0.7)] {
        assert_eq!(classify(rho, a, TOL).unwrap(), Regime::FullDimIV);
        let r = minimize_q(rho, a).unwrap();
        assert_eq!(r.points.len(), 1);
        let found = golden(rho, a, 1e-6, 1.0);
        assert!(
            (r.points[0].1 - found).abs() < 1e-6,
            "({rho},{a}): {:?} vs {found}",
            r.points
        );
        assert!((r.q_min - quadratic_form_q(1.0, found, rho, a).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn symmetric_optimizers_at_unit_ratio() {
    let r = minimize_q(-0.8_f64, 1.0).unwrap();
    let t = 1.0 / (0.8 * 2.6);
    assert_eq!(r.points.len(), 2);
    assert!((r.points[0].1 - t).abs() < 1e-14);
    assert!((r.points[1].0 - t).abs() < 1e-14);
    let other = quadratic_form_q(t, 1.0, -0.8, 1.0).unwrap();
    assert!((r.q_min - other).abs() < 1e-12);
}

#[test]
fn exponent_values() {
    assert!((q_star_exponent(0.0_f64, 1.0).unwrap() - 1.0).abs() < 1e-15);
    assert!((q_star_exponent(-0.5_f64, 0.5).unwrap() - 1.125).abs() < 1e-14);
}

#[test]
fn one_dimensional_regimes() {
    let p = ModelParams::with_ratio(0.7_f64, 0.4, -0.2, 3.0, 0.5);
    let r = approximant(&p, Regime::DimReductionStrict, 3.0, None).unwrap();
    assert_eq!(r.value, single_ruin(0.4, 3.0, 1.0).unwrap());
    assert_eq!(r.u_power, 0);
}

#[test]
fn regime_two_collapses_without_drift() {
    let a = 0.6_f64;
    let rho = critical_rho(a).unwrap();
    let p = ModelParams::with_ratio(rho, 0.0, 0.0, 5.0, a);
    let r = approximant(&p, Regime::FullDimII, 5.0, None).unwrap();
    let tau = tau_constant(Regime::FullDimII, rho, a).unwrap();
    let (l1, _) = lambdas(rho, a).unwrap();
    let want = 2.0 * a / l1 * (2.0 * std::f64::consts::PI / tau).sqrt() / 2.0;
    assert!((r.prefactor - want).abs() < 1e-13 * want);
    assert_eq!(r.u_power, -1);
}

#[test]
fn symmetric_regime_matches_interior_formula() {
    // At a = 1 the two-term constants are the interior constant at each drift order.
    for form in [ConstantsForm::Printed, ConstantsForm::Corrected] {
        let v = full_dim_constants(Regime::FullDimV, -0.8_f64, 1.0, 0.3, 0.7, form).unwrap();
        let iv = full_dim_constants(Regime::FullDimIV, -0.8_f64, 1.0, 0.3, 0.7, form).unwrap();
        let swapped = full_dim_constants(Regime::FullDimIV, -0.8_f64, 1.0, 0.7, 0.3, form).unwrap();
        assert_eq!(v, vec![iv[0], swapped[0]]);
    }
}

#[test]
fn symmetric_regime_is_invariant_under_swap() {
    let p = ModelParams::with_ratio(-0.8_f64, 0.3, 0.7, 4.0, 1.0);
    let q = ModelParams::with_ratio(-0.8_f64, 0.7, 0.3, 4.0, 1.0);
    let x = approximant(&p, Regime::FullDimV, 4.0, None).unwrap();
    let y = approximant(&q, Regime::FullDimV, 4.0, None).unwrap();
    assert!((x.value - y.value).abs() < 1e-13 * x.value);
    assert_eq!(x.density_points.len(), 2);
}

#[test]
fn corrected_and_printed_constants_differ_by_the_crossing_rate() {
    let (rho, a) = (-0.9_f64, 0.5);
    let ts = t_star(rho, a).unwrap();
    let p =
        full_dim_constants(Regime::FullDimIV, rho, a, 0.0, 0.0, ConstantsForm::Printed).unwrap()[0];
    let c = full_dim_constants(
        Regime::FullDimIV,
        rho,
        a,
        0.0,
        0.0,
        ConstantsForm::Corrected,
    )
    .unwrap()[0];
    assert!((c / p - 1.0 / (ts * 2.0_f64.sqrt())).abs() < 1e-13);
    assert_eq!(ConstantsForm::default(), ConstantsForm::Corrected);

    let params = ModelParams::with_ratio(rho, 0.5, 0.5, 4.0, a);
    let opts = ApproxOptions {
        constants: ConstantsForm::Printed,
        ..ApproxOptions::default()
    };
    let printed = approximant_with(&params, Regime::FullDimIV, 4.0, &opts).unwrap();
    let corrected = approximant(&params, Regime::FullDimIV, 4.0, None).unwrap();
    assert!(corrected.value > printed.value);
}

#[test]
fn approximant_errors() {
    let p = ModelParams::with_ratio(0.2_f64, 0.0, 0.0, 3.0, 0.5);
    assert_eq!(
        approximant(&p, Regime::FullDimI, 3.0, None).unwrap_err(),
        RuinError::MissingConstant
    );
    assert!(matches!(
        approximant(&p, Regime::FullDimIV, 3.0, None),
        Err(RuinError::RegimeMismatch { .. })
    ));
    assert!(approximant(&p, Regime::FullDimI, 3.0, Some(-1.0)).is_err());
    let r = approximant(&p, Regime::FullDimI, 3.0, Some(2.5)).unwrap();
    assert_eq!((r.prefactor, r.u_power), (2.5, -2));
}

#[test]
fn supremum_integral_limits() {
    let one = lemma33_integral(1.0_f64, 1.0, 50.0, Lemma33Variant::OneSided).unwrap();
    assert!((one - 2.0).abs() < 1e-3);
    let norm = lemma33_integral(1.0_f64, 0.0, 200.0, Lemma33Variant::Normalized).unwrap();
    assert!((norm - 1.0).abs() < 2e-2);
    assert_eq!(
        lemma33_limit(1.0_f64, 0.0, Lemma33Variant::Normalized).unwrap(),
        1.0
    );
    assert!((lemma33_limit(1.5_f64, 1.0, Lemma33Variant::OneSided).unwrap() - 1.5).abs() < 1e-15);
}

#[test]
fn supremum_integral_matches_direct_simpson() {
    // Independent integration of the same integrand on a plain grid.
    let (b, c, delta): (f64, f64, f64) = (0.8, 0.6, 3.0);
    let r = delta.sqrt();
    let sf = |x: f64| ruin_core::gauss::std_normal_sf(x);
    let f = |x: f64| (sf(x / r + b * r) + (-2.0 * b * x).exp() * sf(x / r - b * r)) * (c * x).exp();
    let (hi, n) = (80.0, 200_000);
    let h = hi / n as f64;
    let mut s = f(0.0) + f(hi);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    let want = 1.0 / c + s * h / 3.0;
    let got = lemma33_integral(b, c, delta, Lemma33Variant::OneSided).unwrap();
    assert!((got - want).abs() < 1e-8, "{got} vs {want}");
}

#[test]
fn gaussian_sums_converge() {
    for (c1, c2) in [(1.0, 0.0), (2.0, 1.0), (1.0, -1.0)] {
        for variant in [SumVariant::OneSided, SumVariant::TwoSided] {
            let limit = gaussian_sum_limit(c1, c2, variant).unwrap();
            let sum = gaussian_sum(c1, c2, 1e4, 1.0, variant).unwrap();
            assert!(
                ((sum - limit) / limit).abs() < 1e-2,
                "{c1},{c2}: {sum} vs {limit}"
            );
        }
    }
}

proptest! {
    #[test]
    fn m_is_linear(c1 in -3.0..3.0_f64, c2 in -3.0..3.0_f64, d1 in -3.0..3.0_f64, d2 in -3.0..3.0_f64,
                   al in -2.0..2.0_f64, be in -2.0..2.0_f64, t in 0.05..1.0_f64, rho in -0.95..0.95_f64, a in 0.05..1.0_f64) {
        let lhs = big_M(al * c1 + be * d1, al * c2 + be * d2, t, rho, a).unwrap();
        let rhs = al * big_M(c1, c2, t, rho, a).unwrap() + be * big_M(d1, d2, t, rho, a).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn interior_optimizer_iff_below_critical(a in 0.01..1.0_f64, rho in -0.99..0.0_f64) {
        prop_assume!(rho < a);
        let crit = critical_rho(a).unwrap();
        prop_assume!((rho - crit).abs() > 1e-9);
        let ts = t_star(rho, a).unwrap();
        prop_assert_eq!(ts > 0.0 && ts < 1.0, rho < crit);
    }

    #[test]
    fn tau_is_positive_on_the_boundary(a in 0.01..1.0_f64) {
        let rho = critical_rho(a).unwrap();
        prop_assert!(tau_constant(Regime::FullDimII, rho, a).unwrap() > 0.0);
    }

    #[test]
    fn tau_is_positive_in_the_interior_regimes(a in 0.01..1.0_f64, frac in 0.001..0.999_f64) {
        let crit = critical_rho(a).unwrap();
        let rho = -0.999 + frac * (crit + 0.999);
        prop_assert!(tau_constant(Regime::FullDimIV, rho, a).unwrap() > 0.0);
        prop_assert!(tau_constant(Regime::FullDimV, rho.min(-0.5), 1.0).unwrap() > 0.0);
    }

    #[test]
    fn classification_is_total(rho in -0.999..0.999_f64, a in 0.001..1.0_f64) {
        let r = classify(rho, a, TOL).unwrap();
        if r.is_full_dimensional() {
            prop_assert!(a > rho);
        }
    }

    #[test]
    fn minimizer_beats_grid(rho in -0.95..0.5_f64, a in 0.05..1.0_f64) {
        prop_assume!(a > rho.max(0.0) + 0.01);
        let r = minimize_q(rho, a).unwrap();
        for i in 1..=40 {
            for j in 1..=40 {
                let q = quadratic_form_q(i as f64 / 40.0, j as f64 / 40.0, rho, a).unwrap();
                prop_assert!(r.q_min <= q + 1e-10);
            }
        }
    }
}
