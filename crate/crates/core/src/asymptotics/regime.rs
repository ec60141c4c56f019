use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Default equality tolerance on regime boundaries.
pub const DEFAULT_TOL: f64 = 1e-9;

/// The seven asymptotic regimes of the joint ruin probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `ρ > a`: the first portfolio alone drives the asymptotics.
    DimReductionStrict,
    /// `ρ = a`: one-dimensional asymptotics times a Gaussian factor.
    DimReductionEqual,
    /// `ρ > A_a`: ruin concentrates at `(1, 1)`, order `u⁻²`.
    FullDimI,
    /// `a < 1`, `ρ = A_a`.
    FullDimII,
    /// `a = 1`, `ρ = −1/2`.
    FullDimIII,
    /// `a < 1`, `ρ < A_a`: ruin concentrates at `(1, t*)`.
    FullDimIV,
    /// `a = 1`, `ρ < −1/2`: two symmetric optimizers.
    FullDimV,
}

impl Regime {
    pub const ALL: [Regime; 7] = [
        Regime::DimReductionStrict,
        Regime::DimReductionEqual,
        Regime::FullDimI,
        Regime::FullDimII,
        Regime::FullDimIII,
        Regime::FullDimIV,
        Regime::FullDimV,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Regime::DimReductionStrict => "DimReductionStrict",
            Regime::DimReductionEqual => "DimReductionEqual",
            Regime::FullDimI => "FullDim_I",
            Regime::FullDimII => "FullDim_II",
            Regime::FullDimIII => "FullDim_III",
            Regime::FullDimIV => "FullDim_IV",
            Regime::FullDimV => "FullDim_V",
        }
    }

    pub fn is_full_dimensional(&self) -> bool {
        !matches!(self, Regime::DimReductionStrict | Regime::DimReductionEqual)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown regime `{s}`"))
    }
}

/// Which closed form to use for the critical correlation `A_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AaForm {
    /// `(1 − √(1 + 8a²)) / (4a)`: where `t*` crosses 1.
    #[default]
    Derived,
    /// `(1 − √(a² + 8)) / (4a)`, kept for compatibility. Agrees with
    /// [`AaForm::Derived`] only at `a = 1`.
    Printed,
}

fn check_ratio<T: Real>(a: T) -> Result<()> {
    if a > T::zero() && a <= T::one() {
        Ok(())
    } else {
        invalid("a", a.as_f64(), "must lie in (0, 1]")
    }
}

/// Critical correlation `A_a` separating regimes I and IV/V.
pub fn critical_rho<T: Real>(a: T) -> Result<T> {
    critical_rho_with(a, AaForm::Derived)
}

pub fn critical_rho_with<T: Real>(a: T, form: AaForm) -> Result<T> {
    check_ratio(a)?;
    let root = match form {
        AaForm::Derived => (T::one() + T::lit(8.0) * a * a).sqrt(),
        AaForm::Printed => (a * a + T::lit(8.0)).sqrt(),
    };
    Ok((T::one() - root) / (T::lit(4.0) * a))
}

/// Regime of `(ρ, a)` with boundary tolerance `tol`.
pub fn classify<T: Real>(rho: T, a: T, tol: T) -> Result<Regime> {
    classify_with(rho, a, tol, AaForm::Derived)
}

pub fn classify_with<T: Real>(rho: T, a: T, tol: T, form: AaForm) -> Result<Regime> {
    if !(rho.abs() < T::one()) {
        return invalid("rho", rho.as_f64(), "must satisfy |rho| < 1");
    }
    check_ratio(a)?;
    if !(tol >= T::zero()) {
        return invalid("tol", tol.as_f64(), "must be non-negative");
    }
    if rho > T::zero() && rho - a > tol {
        return Ok(Regime::DimReductionStrict);
    }
    if rho > T::zero() && (rho - a).abs() <= tol {
        return Ok(Regime::DimReductionEqual);
    }
    // From here a > max(0, ρ). `a = 1` is matched with the same tolerance so
    // that a ratio typed as 0.9999999999 lands in the symmetric regimes.
    let unit = (T::one() - a) <= tol;
    let crit = critical_rho_with(a, form)?;
    let regime = if (rho - crit).abs() <= tol {
        if unit {
            Regime::FullDimIII
        } else {
            Regime::FullDimII
        }
    } else if rho < crit {
        if unit {
            Regime::FullDimV
        } else {
            Regime::FullDimIV
        }
    } else {
        Regime::FullDimI
    };
    Ok(regime)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_values() {
        assert!((critical_rho(1.0_f64).unwrap() + 0.5).abs() < 1e-15);
        assert!((critical_rho_with(1.0_f64, AaForm::Printed).unwrap() + 0.5).abs() < 1e-15);
        let half = critical_rho(0.5_f64).unwrap();
        assert!((half - (1.0 - 3.0_f64.sqrt()) / 2.0).abs() < 1e-15);
        let printed = critical_rho_with(0.5_f64, AaForm::Printed).unwrap();
        assert!((printed + 0.936).abs() < 1e-3);
        let small = critical_rho(1e-4_f64).unwrap();
        assert!((small + 1e-4).abs() < 1e-11);
        assert!(critical_rho(0.0_f64).is_err());
        assert!(critical_rho(1.5_f64).is_err());
    }

    #[test]
    fn classification_examples() {
        let tol = DEFAULT_TOL;
        assert_eq!(classify(0.7, 0.3, tol).unwrap(), Regime::DimReductionStrict);
        assert_eq!(classify(0.4, 0.4, tol).unwrap(), Regime::DimReductionEqual);
        assert_eq!(classify(-0.5, 1.0, tol).unwrap(), Regime::FullDimIII);
        assert_eq!(classify(-0.9, 0.5, tol).unwrap(), Regime::FullDimIV);
        assert_eq!(classify(-0.8, 1.0, tol).unwrap(), Regime::FullDimV);
        assert_eq!(classify(0.0, 0.5, tol).unwrap(), Regime::FullDimI);
        let crit = critical_rho(0.5).unwrap();
        assert_eq!(classify(crit, 0.5, tol).unwrap(), Regime::FullDimII);
        assert!(classify(1.0, 0.5, tol).is_err());
        assert!(classify(0.2, 0.5, -1.0).is_err());
    }

    #[test]
    fn printed_form_moves_the_boundary() {
        assert_eq!(
            classify_with(-0.6, 0.5, DEFAULT_TOL, AaForm::Printed).unwrap(),
            Regime::FullDimI
        );
        assert_eq!(classify(-0.6, 0.5, DEFAULT_TOL).unwrap(), Regime::FullDimIV);
    }

    #[test]
    fn names_round_trip() {
        for r in Regime::ALL {
            assert_eq!(r.name().parse::<Regime>().unwrap(), r);
        }
    }
}
