use proptest::prelude::*;
use ruin_core::exact::*;
use ruin_core::gauss::std_normal_sf;

/// Ruin probability as the integral of the first-passage density
/// `u / √(2π t³) · exp(−(u + c t)² / (2t))` over `(0, T]`, by composite
/// Simpson in the variable `t = x²` to tame the endpoint at zero.
fn first_passage(c: f64, u: f64, horizon: f64) -> f64 {
    let n = 20_000;
    let top = horizon.sqrt();
    let h = top / n as f64;
    let f = |x: f64| {
        if x == 0.0 {
            return 0.0;
        }
        let t = x * x;
        let dens = u / (2.0 * std::f64::consts::PI * t * t * t).sqrt()
            * (-(u + c * t).powi(2) / (2.0 * t)).exp();
        dens * 2.0 * x
    };
    let mut total = f(0.0) + f(top);
    for i in 1..n {
        total += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    total * h / 3.0
}

#[test]
fn single_ruin_matches_first_passage_integral() {
    for (c, u, t) in [
        (1.0_f64, 2.0_f64, 1.0_f64),
        (0.0, 1.0, 1.0),
        (-0.5, 0.7, 2.0),
        (2.0, 0.3, 0.5),
    ] {
        let want = first_passage(c, u, t);
        let got = single_ruin(c, u, t).unwrap();
        assert!((got - want).abs() < 1e-9, "({c},{u},{t}): {got} vs {want}");
    }
}

#[test]
fn single_ruin_worked_values() {
    assert!((single_ruin(0.0, 1.0, 1.0).unwrap() - 2.0 * std_normal_sf(1.0_f64)).abs() < 1e-15);
    assert!((single_ruin(0.0_f64, 1.0, 1.0).unwrap() - 0.3173105078629141).abs() < 1e-15);
    let want = std_normal_sf(3.0_f64) + (-4.0_f64).exp() * std_normal_sf(1.0_f64);
    assert!((single_ruin(1.0, 2.0, 1.0).unwrap() - want).abs() < 1e-16);
    for c in [-3.0, 0.0, 2.5] {
        assert_eq!(single_ruin(c, 0.0, 1.7).unwrap(), 1.0);
    }
}

#[test]
fn single_ruin_survives_extreme_exponent() {
    // e^{−2cu} overflows for c u ≪ 0; the combined log-space term stays finite.
    let p = single_ruin(-400.0, 5.0, 1.0).unwrap();
    assert!(p == 1.0 || (p > 0.999 && p <= 1.0));
    let q = single_ruin(400.0, 5.0, 1.0).unwrap();
    assert!((0.0..1e-300).contains(&q));
}

#[test]
fn single_ruin_rejects_bad_input() {
    assert!(single_ruin(0.0, -1.0, 1.0).is_err());
    assert!(single_ruin(0.0, 1.0, 0.0).is_err());
    assert!(single_ruin(f64::NAN, 1.0, 1.0).is_err());
}

#[test]
fn independent_ruin_is_a_product() {
    assert_eq!(independent_ruin(0.3, -0.2, 0.0, 0.0).unwrap(), 1.0);
    let square = (2.0 * std_normal_sf(1.0_f64)).powi(2);
    assert!((independent_ruin(0.0, 0.0, 1.0, 1.0).unwrap() - square).abs() < 1e-15);
    assert!((square - 0.10068595840022047).abs() < 1e-15);
}

#[test]
fn bounds_with_collapsed_amplification() {
    let p = ModelParams::with_levels(0.5, 0.0, 0.0, 2.0, 2.0);
    let b = ruin_bounds(&p).unwrap();
    assert_eq!(b.amplification, 4.0);
    assert!(b.lower < b.upper);
    let p = ModelParams::with_levels(0.5, -1.0, -0.6, 2.0, 2.0);
    assert_eq!(ruin_bounds(&p).unwrap().amplification, 4.0);
}

#[test]
fn bounds_reject_correlation_outside_unit_interval() {
    for rho in [0.0, -0.3, 1.0] {
        assert!(ruin_bounds(&ModelParams::with_levels(rho, 0.0, 0.0, 1.0, 1.0)).is_err());
    }
    assert!(ruin_bounds(&ModelParams::with_levels(0.5, 0.0, 0.0, -1.0, 1.0)).is_err());
}

#[test]
fn bounds_accept_ratio_form() {
    let a = ruin_bounds(&ModelParams::with_ratio(0.4, 0.2, 0.1, 2.0, 0.5)).unwrap();
    let b = ruin_bounds(&ModelParams::with_levels(0.4, 0.2, 0.1, 2.0, 1.0)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn single_precision_is_close() {
    let x = single_ruin(1.0_f32, 2.0, 1.0).unwrap() as f64;
    assert!((x - single_ruin(1.0_f64, 2.0, 1.0).unwrap()).abs() < 1e-6);
}

proptest! {
    #[test]
    fn single_ruin_is_a_probability(c in -20.0..20.0_f64, u in 0.0..20.0_f64, t in 0.01..10.0_f64) {
        let p = single_ruin(c, u, t).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn single_ruin_decreases_in_capital(c in -3.0..3.0_f64, u in 0.0..5.0_f64, d in 0.001..1.0_f64) {
        prop_assert!(single_ruin(c, u + d, 1.0).unwrap() <= single_ruin(c, u, 1.0).unwrap() + 1e-15);
    }

    #[test]
    fn single_ruin_decreases_in_drift(c in -3.0..3.0_f64, u in 0.0..5.0_f64, d in 0.001..1.0_f64) {
        prop_assert!(single_ruin(c + d, u, 1.0).unwrap() <= single_ruin(c, u, 1.0).unwrap() + 1e-15);
    }

    #[test]
    fn single_ruin_is_self_similar(c in -3.0..3.0_f64, u in 0.0..5.0_f64, t in 0.05..20.0_f64) {
        let direct = single_ruin(c, u, t).unwrap();
        let scaled = single_ruin(c * t.sqrt(), u / t.sqrt(), 1.0).unwrap();
        prop_assert!((direct - scaled).abs() < 1e-12);
    }

    #[test]
    fn bounds_are_ordered(rho in 0.01..0.99_f64, c1 in -3.0..3.0_f64, c2 in -3.0..3.0_f64, u in 0.0..4.0_f64, v in 0.0..4.0_f64) {
        let b = ruin_bounds(&ModelParams::with_levels(rho, c1, c2, u, v)).unwrap();
        prop_assert!(b.amplification >= 4.0);
        prop_assert!(0.0 <= b.lower && b.lower <= b.upper && b.upper <= 1.0);
        let collapsed = c1 <= 0.0 && c2 <= rho * c1;
        prop_assert_eq!(b.amplification == 4.0, collapsed);
    }

    #[test]
    fn horizon_rescaling_leaves_bounds_unchanged(rho in 0.05..0.95_f64, c1 in -2.0..2.0_f64, c2 in -2.0..2.0_f64, u in 0.0..3.0_f64, v in 0.0..3.0_f64, t in 0.2..5.0_f64) {
        let long = ruin_bounds(&ModelParams::with_levels(rho, c1, c2, u, v).horizon(t)).unwrap();
        let r = t.sqrt();
        let unit = ruin_bounds(&ModelParams::with_levels(rho, c1 * r, c2 * r, u / r, v / r)).unwrap();
        prop_assert!((long.lower - unit.lower).abs() < 1e-13);
    }
}
