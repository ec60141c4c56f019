/// Point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub ci95: (f64, f64),
}

impl MCEstimate {
    pub fn new(mean: f64, std_error: f64, n_samples: u64) -> Self {
        Self {
            mean,
            std_error,
            n_samples,
            ci95: (mean - 1.96 * std_error, mean + 1.96 * std_error),
        }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }
}

/// Running mean and centred second moment (Welford), mergeable.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Combines two disjoint samples. Merging in a fixed order keeps the
    /// result independent of how the work was scheduled.
    pub fn merge(&mut self, other: &Accumulator) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        self.mean += d * w;
        self.m2 += other.m2 + d * d * self.n as f64 * w;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    /// Mean with the standard error `√(σ̂²/n)`, where `σ̂²` is the plug-in
    /// variance. For indicators this is the binomial error `√(p(1−p)/n)`.
    pub fn estimate(&self) -> MCEstimate {
        if self.n == 0 {
            return MCEstimate::new(f64::NAN, f64::NAN, 0);
        }
        let n = self.n as f64;
        let var = (self.m2 / n).max(0.0);
        MCEstimate::new(self.mean, (var / n).sqrt(), self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut all = Accumulator::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut parts = Accumulator::default();
        for chunk in xs.chunks(77) {
            let mut a = Accumulator::default();
            chunk.iter().for_each(|&x| a.push(x));
            parts.merge(&a);
        }
        let (e1, e2) = (all.estimate(), parts.estimate());
        assert!((e1.mean - e2.mean).abs() < 1e-12);
        assert!((e1.std_error - e2.std_error).abs() < 1e-12);
    }

    #[test]
    fn indicator_error_is_binomial() {
        let mut a = Accumulator::default();
        for i in 0..1000 {
            a.push(if i % 4 == 0 { 1.0 } else { 0.0 });
        }
        let e = a.estimate();
        assert!((e.mean - 0.25).abs() < 1e-15);
        assert!((e.std_error - (0.25f64 * 0.75 / 1000.0).sqrt()).abs() < 1e-15);
        assert!((e.ci95.1 - e.ci95.0 - 2.0 * 1.96 * e.std_error).abs() < 1e-15);
    }
}
