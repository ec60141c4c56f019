use ruin_core::asymptotics::Regime;
use ruin_core::verify::*;
use ruin_core::Result;

#[test]
fn quick_level_passes() {
    let report = run(Level::Quick, &VerifyOptions::default());
    assert_eq!(report.criteria.len(), QUICK.len());
    assert!(report.passed(), "{}", report.render());
}

fn sabotaged_tau(_: Regime, _: f64, _: f64) -> Result<f64> {
    Ok(1.0)
}

#[test]
fn wrong_tau_is_caught() {
    let opts = VerifyOptions {
        tau: sabotaged_tau,
        ..VerifyOptions::default()
    };
    let report = criterion(1, &opts);
    assert!(!report.passed, "{}", report.line());
    assert!(criterion(1, &VerifyOptions::default()).passed);
}

#[test]
fn rendering_is_stable() {
    let opts = VerifyOptions::default();
    let a = run(Level::Quick, &opts).render();
    let b = run(Level::Quick, &opts).render();
    assert_eq!(a, b);
    assert!(a.ends_with("6/6 criteria passed\n"));
    assert!(a.starts_with("[ 1] pass"));
}

#[test]
fn unknown_criterion_fails() {
    let r = criterion(99, &VerifyOptions::default());
    assert!(!r.passed);
    assert_eq!(name(99), "unknown");
}
