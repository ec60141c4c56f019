use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};

/// Values of the correlated pair on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGrid {
    pub times: Vec<f64>,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
}

/// Independent standard drivers `(B1, B2)` at `steps + 1` grid times.
pub fn sample_drivers<R: Rng + ?Sized>(steps: usize, horizon: f64, rng: &mut R) -> Vec<(f64, f64)> {
    let root = (horizon / steps as f64).sqrt();
    let mut out = Vec::with_capacity(steps + 1);
    let (mut b1, mut b2) = (0.0, 0.0);
    out.push((b1, b2));
    for _ in 0..steps {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        b1 += root * z1;
        b2 += root * z2;
        out.push((b1, b2));
    }
    out
}

/// Samples `(W1, W2) = (B1, ρ B1 + √(1−ρ²) B2)` on `grid_points` equal steps
/// of `[0, horizon]`.
pub fn sample_path<R: Rng + ?Sized>(
    rho: f64,
    grid_points: usize,
    horizon: f64,
    rng: &mut R,
) -> Result<PathGrid> {
    if !(rho.abs() < 1.0) {
        return invalid("rho", rho, "must satisfy |rho| < 1");
    }
    if grid_points < 1 {
        return invalid("grid_points", grid_points as f64, "must be at least 1");
    }
    if !(horizon > 0.0) {
        return invalid("horizon", horizon, "must be positive");
    }
    let sigma = (1.0 - rho * rho).sqrt();
    let drivers = sample_drivers(grid_points, horizon, rng);
    let h = horizon / grid_points as f64;
    Ok(PathGrid {
        times: (0..=grid_points).map(|k| k as f64 * h).collect(),
        w1: drivers.iter().map(|d| d.0).collect(),
        w2: drivers.iter().map(|d| rho * d.0 + sigma * d.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn starts_at_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = sample_path(0.3, 16, 2.0, &mut rng).unwrap();
        assert_eq!((p.w1[0], p.w2[0]), (0.0, 0.0));
        assert_eq!(p.times.len(), 17);
        assert_eq!(p.times[16], 2.0);
        assert!(sample_path(1.0, 16, 1.0, &mut rng).is_err());
    }
}
