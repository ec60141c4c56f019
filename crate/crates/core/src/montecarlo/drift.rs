//! Piecewise-constant drift of the driving Brownian motions, used as an
//! importance-sampling change of measure.

/// Drift `θ(r) = (θ1, θ2)` of the independent drivers `(B1, B2)`, constant on
/// consecutive segments that end at `ends[i]` (the last end is the horizon).
#[derive(Debug, Clone, PartialEq)]
pub struct DriftSchedule {
    ends: Vec<f64>,
    theta: Vec<(f64, f64)>,
    start_value: Vec<(f64, f64)>,
}

impl DriftSchedule {
    /// No drift over `[0, horizon]`.
    pub fn null(horizon: f64) -> Self {
        Self::new(vec![(horizon, 0.0, 0.0)])
    }

    pub fn constant(horizon: f64, theta1: f64, theta2: f64) -> Self {
        Self::new(vec![(horizon, theta1, theta2)])
    }

    /// Builds from `(end, θ1, θ2)` triples with strictly increasing ends.
    pub fn new(segments: Vec<(f64, f64, f64)>) -> Self {
        assert!(!segments.is_empty(), "drift needs at least one segment");
        let mut ends = Vec::with_capacity(segments.len());
        let mut theta = Vec::with_capacity(segments.len());
        let mut start_value = Vec::with_capacity(segments.len());
        let (mut t, mut acc) = (0.0, (0.0, 0.0));
        for (end, a, b) in segments {
            assert!(end > t, "segment ends must increase");
            start_value.push(acc);
            acc = (acc.0 + a * (end - t), acc.1 + b * (end - t));
            ends.push(end);
            theta.push((a, b));
            t = end;
        }
        Self {
            ends,
            theta,
            start_value,
        }
    }

    pub fn horizon(&self) -> f64 {
        *self.ends.last().unwrap()
    }

    pub fn is_null(&self) -> bool {
        self.theta.iter().all(|&(a, b)| a == 0.0 && b == 0.0)
    }

    /// Interior breakpoints where the drift changes.
    pub fn kinks(&self) -> &[f64] {
        &self.ends[..self.ends.len() - 1]
    }

    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, (f64, f64))> + '_ {
        self.ends.iter().enumerate().map(move |(i, &end)| {
            let start = if i == 0 { 0.0 } else { self.ends[i - 1] };
            (start, end, self.theta[i])
        })
    }

    /// Drift in force just after time `t`.
    #[inline]
    pub fn at(&self, t: f64) -> (f64, f64) {
        let i = self
            .ends
            .partition_point(|&e| e <= t)
            .min(self.ends.len() - 1);
        self.theta[i]
    }

    /// Integrated drift `Θ(t) = ∫_0^t θ`.
    #[inline]
    pub fn integral(&self, t: f64) -> (f64, f64) {
        let mut start = 0.0;
        for (i, &end) in self.ends.iter().enumerate() {
            if t <= end || i + 1 == self.ends.len() {
                let (a, b) = self.theta[i];
                let (x, y) = self.start_value[i];
                return (x + a * (t - start), y + b * (t - start));
            }
            start = end;
        }
        unreachable!()
    }

    /// `log dQ/dP` on a path whose driver values at the segment ends are
    /// supplied by `driver_at`: `∫θ·dB − ½∫|θ|²`.
    pub fn log_density(&self, mut driver_at: impl FnMut(f64) -> (f64, f64)) -> f64 {
        let mut prev = (0.0, 0.0);
        let mut total = 0.0;
        for (start, end, (a, b)) in self.segments() {
            let now = driver_at(end);
            total +=
                a * (now.0 - prev.0) + b * (now.1 - prev.1) - 0.5 * (a * a + b * b) * (end - start);
            prev = now;
        }
        total
    }

    /// Moves interior breakpoints to the nearest multiple of `step`,
    /// dropping those that collapse onto 0, the horizon or each other.
    pub fn snapped(&self, step: f64) -> Self {
        let horizon = self.horizon();
        let mut segs: Vec<(f64, f64, f64)> = Vec::new();
        for (_, end, (a, b)) in self.segments() {
            let e = if end == horizon {
                horizon
            } else {
                ((end / step).round() * step).min(horizon)
            };
            if e <= 0.0 || segs.last().is_some_and(|s| e <= s.0) {
                continue;
            }
            segs.push((e, a, b));
        }
        if segs.last().map(|s| s.0) != Some(horizon) {
            let (a, b) = *self.theta.last().unwrap();
            segs.push((horizon, a, b));
        }
        Self::new(segs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_is_piecewise_linear() {
        let d = DriftSchedule::new(vec![(0.3, 2.0, -1.0), (1.0, 0.5, 0.0)]);
        let (x, y) = d.integral(0.3);
        assert!((x - 0.6).abs() < 1e-15 && (y + 0.3).abs() < 1e-15);
        let (x, _) = d.integral(1.0);
        assert!((x - 0.95).abs() < 1e-15);
        assert_eq!(d.kinks(), &[0.3]);
    }

    #[test]
    fn snapping_keeps_horizon() {
        let d = DriftSchedule::new(vec![(0.2924, 1.0, 1.0), (1.0, 2.0, 0.0)]);
        let s = d.snapped(1.0 / 1024.0);
        assert_eq!(s.kinks(), &[299.0 / 1024.0]);
        assert_eq!(s.horizon(), 1.0);
        let tiny = DriftSchedule::new(vec![(1e-6, 1.0, 1.0), (1.0, 2.0, 0.0)]).snapped(0.25);
        assert!(tiny.kinks().is_empty());
    }

    #[test]
    fn log_density_of_constant_drift() {
        let d = DriftSchedule::constant(2.0, 1.0, -0.5);
        let l = d.log_density(|_| (0.7, 0.1));
        assert!((l - (0.7 - 0.05 - 0.5 * 1.25 * 2.0)).abs() < 1e-15);
    }
}
