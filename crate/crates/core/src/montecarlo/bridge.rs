//! Lazy dyadic Brownian-bridge construction of the correlated pair.
//!
//! A path on the uniform grid with `2^depth` steps is generated top-down: the
//! value at the horizon first, then midpoints level by level. Midpoint values
//! use the normals attached to the node id, so any subset of nodes agrees
//! exactly with the fully refined path. Cells whose continuous bridge
//! crosses the level of interest with probability below `PRUNE_EPS` are not
//! refined; the grid maximum is therefore exact except on events of that
//! probability per pruned cell.

use crate::montecarlo::drift::DriftSchedule;
use crate::montecarlo::rng::NodeSource;

/// Per-cell probability below which a bridge is not refined.
pub const PRUNE_EPS: f64 = 1e-12;

/// Deterministic part of the two coordinates as a function of time.
pub trait Shift {
    fn shift(&self, coord: usize, t: f64) -> f64;

    /// Largest excess of the shift over its chord on `[t0, t1]`; zero when
    /// the shift is linear there.
    fn kink_excess(&self, _coord: usize, _t0: f64, _t1: f64) -> f64 {
        0.0
    }
}

/// A shift that is affine on the cell being searched.
#[derive(Debug, Clone, Copy)]
pub struct LinearShift {
    pub t0: f64,
    pub at_t0: [f64; 2],
    pub slope: [f64; 2],
}

impl Shift for LinearShift {
    #[inline]
    fn shift(&self, coord: usize, t: f64) -> f64 {
        self.at_t0[coord] + self.slope[coord] * (t - self.t0)
    }
}

/// The model seen by the simulator: `X1 = W1 − c1 t`, `X2 = W2 − c2 t` with
/// `W1 = B1`, `W2 = ρ B1 + √(1−ρ²) B2`, where the drivers `B` carry the
/// drift of the sampling measure.
#[derive(Debug, Clone)]
pub struct PathModel {
    pub rho: f64,
    pub c1: f64,
    pub c2: f64,
    pub horizon: f64,
    pub depth: u32,
    pub drift: DriftSchedule,
    sigma: f64,
    half_root: Vec<f64>,
    cell: Vec<f64>,
    log_inv_eps: f64,
}

impl PathModel {
    pub fn new(rho: f64, c1: f64, c2: f64, horizon: f64, depth: u32, drift: DriftSchedule) -> Self {
        let cell: Vec<f64> = (0..=depth).map(|l| horizon / (1u64 << l) as f64).collect();
        let half_root = cell.iter().map(|h| 0.5 * h.sqrt()).collect();
        Self {
            rho,
            c1,
            c2,
            horizon,
            depth,
            drift,
            sigma: (1.0 - rho * rho).sqrt(),
            half_root,
            cell,
            log_inv_eps: -PRUNE_EPS.ln(),
        }
    }

    pub fn with_drift(&self, drift: DriftSchedule) -> Self {
        Self::new(self.rho, self.c1, self.c2, self.horizon, self.depth, drift)
    }

    pub fn step(&self) -> f64 {
        self.cell[self.depth as usize]
    }

    /// Noise part of coordinate `coord` given the driver values.
    #[inline]
    pub fn noise(&self, coord: usize, b1: f64, b2: f64) -> f64 {
        if coord == 0 {
            b1
        } else {
            self.rho * b1 + self.sigma * b2
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn cell_length(&self, level: u32) -> f64 {
        self.cell[level as usize]
    }

    /// Coordinate `coord` of the risk process given the undrifted drivers.
    #[inline]
    pub fn coordinate(&self, coord: usize, t: f64, b1: f64, b2: f64) -> f64 {
        self.noise(coord, b1, b2) + self.shift(coord, t)
    }
}

impl Shift for PathModel {
    #[inline]
    fn shift(&self, coord: usize, t: f64) -> f64 {
        if self.drift.is_null() {
            return if coord == 0 {
                -self.c1 * t
            } else {
                -self.c2 * t
            };
        }
        let (a, b) = self.drift.integral(t);
        if coord == 0 {
            a - self.c1 * t
        } else {
            self.rho * a + self.sigma * b - self.c2 * t
        }
    }

    #[inline]
    fn kink_excess(&self, coord: usize, t0: f64, t1: f64) -> f64 {
        let mut best = 0.0_f64;
        for &p in self.drift.kinks() {
            if p > t0 && p < t1 {
                let g0 = self.shift(coord, t0);
                let g1 = self.shift(coord, t1);
                let chord = g0 + (g1 - g0) * (p - t0) / (t1 - t0);
                best = best.max(self.shift(coord, p) - chord);
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    level: u32,
    index: u64,
    left: (f64, f64),
    right: (f64, f64),
}

/// One path under construction.
pub struct Walker<'m> {
    model: &'m PathModel,
    src: NodeSource,
    terminal: (f64, f64),
    stack: Vec<Cell>,
}

impl<'m> Walker<'m> {
    pub fn new(model: &'m PathModel, key: &[u8; 32]) -> Self {
        Self {
            model,
            src: NodeSource::new(key, 0),
            terminal: (0.0, 0.0),
            stack: Vec::with_capacity(256),
        }
    }

    /// Starts a fresh path on `stream`.
    pub fn start(&mut self, stream: u64) {
        self.src.reset(stream);
        let (z1, z2) = self.src.normals(0);
        let r = self.model.horizon.sqrt();
        self.terminal = (r * z1, r * z2);
    }

    pub fn model(&self) -> &PathModel {
        self.model
    }

    #[inline]
    fn midpoint(&mut self, cell: &Cell) -> (f64, f64) {
        let id = (1u64 << cell.level) + cell.index;
        let (z1, z2) = self.src.normals(id);
        let k = self.model.half_root[cell.level as usize];
        (
            0.5 * (cell.left.0 + cell.right.0) + k * z1,
            0.5 * (cell.left.1 + cell.right.1) + k * z2,
        )
    }

    fn root(&self) -> Cell {
        Cell {
            level: 0,
            index: 0,
            left: (0.0, 0.0),
            right: self.terminal,
        }
    }

    /// True when the continuous bridge over `cell` may exceed `level` with
    /// probability at least the pruning threshold.
    #[inline]
    fn worth_refining<S: Shift>(&self, coord: usize, cell: &Cell, level: f64, shift: &S) -> bool {
        let m = self.model;
        let h = m.cell[cell.level as usize];
        let t0 = cell.index as f64 * h;
        let t1 = t0 + h;
        let x0 = m.noise(coord, cell.left.0, cell.left.1) + shift.shift(coord, t0);
        let x1 = m.noise(coord, cell.right.0, cell.right.1) + shift.shift(coord, t1);
        let top = level - shift.kink_excess(coord, t0, t1);
        if top <= x0.max(x1) {
            return true;
        }
        2.0 * (top - x0) * (top - x1) < m.log_inv_eps * h
    }

    fn push_children<S: Shift>(&mut self, coord: usize, cell: &Cell, mid: (f64, f64), shift: &S) {
        let left = Cell {
            level: cell.level + 1,
            index: 2 * cell.index,
            left: cell.left,
            right: mid,
        };
        let right = Cell {
            level: cell.level + 1,
            index: 2 * cell.index + 1,
            left: mid,
            right: cell.right,
        };
        // Visit the half with the higher endpoint first.
        let m = self.model;
        let h = m.cell[left.level as usize];
        let t_mid = (2 * cell.index + 1) as f64 * h;
        let left_end = m.noise(coord, left.left.0, left.left.1) + shift.shift(coord, t_mid - h);
        let right_end =
            m.noise(coord, right.right.0, right.right.1) + shift.shift(coord, t_mid + h);
        if left_end > right_end {
            self.stack.push(right);
            self.stack.push(left);
        } else {
            self.stack.push(left);
            self.stack.push(right);
        }
    }

    /// Depth-first search below `root` for an interior grid node above `level`.
    fn search<S: Shift>(
        &mut self,
        coord: usize,
        level: f64,
        depth: u32,
        root: Cell,
        shift: &S,
    ) -> bool {
        let m = self.model;
        self.stack.clear();
        self.stack.push(root);
        while let Some(cell) = self.stack.pop() {
            if cell.level >= depth || !self.worth_refining(coord, &cell, level, shift) {
                continue;
            }
            let mid = self.midpoint(&cell);
            let h = m.cell[cell.level as usize + 1];
            let t = (2 * cell.index + 1) as f64 * h;
            if m.noise(coord, mid.0, mid.1) + shift.shift(coord, t) > level {
                self.stack.clear();
                return true;
            }
            self.push_children(coord, &cell, mid, shift);
        }
        false
    }

    /// Whether some grid node of refinement `depth` has `X_coord > level`.
    pub fn exceeds(&mut self, coord: usize, level: f64, depth: u32) -> bool {
        if 0.0 > level {
            return true;
        }
        let m = self.model;
        if m.coordinate(coord, m.horizon, self.terminal.0, self.terminal.1) > level {
            return true;
        }
        let root = self.root();
        self.search(coord, level, depth, root, m)
    }

    /// Whether a grid node of refinement `depth` inside coarse cell `index`
    /// of level `coarse`, right endpoint included, has `X_coord > level`.
    /// `left` and `right` are the undrifted drivers at the cell ends and
    /// `shift` gives the deterministic part on the cell.
    #[allow(clippy::too_many_arguments)]
    pub fn cell_exceeds<S: Shift>(
        &mut self,
        coord: usize,
        level: f64,
        depth: u32,
        coarse: u32,
        index: u64,
        left: (f64, f64),
        right: (f64, f64),
        shift: &S,
    ) -> bool {
        let m = self.model;
        let t1 = (index + 1) as f64 * m.cell[coarse as usize];
        if m.noise(coord, right.0, right.1) + shift.shift(coord, t1) > level {
            return true;
        }
        let root = Cell {
            level: coarse,
            index,
            left,
            right,
        };
        self.search(coord, level, depth, root, shift)
    }

    /// Grid maximum of `X_coord` at refinement `depth` when it exceeds
    /// `floor`; `None` otherwise.
    pub fn grid_max(&mut self, coord: usize, floor: f64, depth: u32) -> Option<f64> {
        let m = self.model;
        let mut best = m
            .coordinate(coord, m.horizon, self.terminal.0, self.terminal.1)
            .max(0.0);
        self.stack.clear();
        self.stack.push(self.root());
        while let Some(cell) = self.stack.pop() {
            if cell.level >= depth || !self.worth_refining(coord, &cell, best.max(floor), m) {
                continue;
            }
            let mid = self.midpoint(&cell);
            let h = m.cell[cell.level as usize + 1];
            let t = (2 * cell.index + 1) as f64 * h;
            best = best.max(m.coordinate(coord, t, mid.0, mid.1));
            self.push_children(coord, &cell, mid, m);
        }
        (best > floor).then_some(best)
    }

    /// Undrifted driver values at grid node `k` of refinement `depth`.
    pub fn drivers_at(&mut self, k: u64, depth: u32) -> (f64, f64) {
        let n = 1u64 << depth;
        if k == 0 {
            return (0.0, 0.0);
        }
        if k == n {
            return self.terminal;
        }
        let mut cell = self.root();
        // Node position in units of the current cell's half-width.
        loop {
            let mid = self.midpoint(&cell);
            let span = n >> cell.level;
            let centre = cell.index * span + span / 2;
            if k == centre {
                return mid;
            }
            let next = if k < centre {
                Cell {
                    level: cell.level + 1,
                    index: 2 * cell.index,
                    left: cell.left,
                    right: mid,
                }
            } else {
                Cell {
                    level: cell.level + 1,
                    index: 2 * cell.index + 1,
                    left: mid,
                    right: cell.right,
                }
            };
            cell = next;
        }
    }

    /// Driver values under the sampling measure (noise plus drift) at time
    /// `t`, which must be a grid node of refinement `depth`.
    pub fn drifted_drivers_at(&mut self, t: f64, depth: u32) -> (f64, f64) {
        let n = (1u64 << depth) as f64;
        let k = (t / self.model.horizon * n).round() as u64;
        let (b1, b2) = self.drivers_at(k, depth);
        let (d1, d2) = self.model.drift.integral(t);
        (b1 + d1, b2 + d2)
    }

    /// Every grid node of refinement `depth`, by full bridge refinement.
    pub fn full_grid(&mut self, depth: u32) -> Vec<(f64, f64)> {
        let n = 1usize << depth;
        let mut vals = vec![(0.0, 0.0); n + 1];
        vals[n] = self.terminal;
        for level in 0..depth {
            let span = n >> level;
            for j in 0..(1usize << level) {
                let cell = Cell {
                    level,
                    index: j as u64,
                    left: vals[j * span],
                    right: vals[(j + 1) * span],
                };
                vals[j * span + span / 2] = self.midpoint(&cell);
            }
        }
        vals
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::rng::key_from_seed;

    fn model(drift: DriftSchedule) -> PathModel {
        PathModel::new(-0.4, 0.3, -0.2, 1.0, 10, drift)
    }

    #[test]
    fn lazy_maximum_matches_full_refinement() {
        let key = key_from_seed(3);
        let drifts = [
            DriftSchedule::null(1.0),
            DriftSchedule::new(vec![(0.375, 1.5, 2.0), (1.0, 0.7, 0.0)]),
        ];
        for drift in drifts {
            let m = model(drift);
            let mut w = Walker::new(&m, &key);
            for path in 0..300 {
                w.start(2 * path);
                let grid = w.full_grid(m.depth);
                for coord in 0..2 {
                    let full = grid
                        .iter()
                        .enumerate()
                        .map(|(k, &(b1, b2))| m.coordinate(coord, k as f64 * m.step(), b1, b2))
                        .fold(f64::NEG_INFINITY, f64::max);
                    let lazy = w.grid_max(coord, f64::NEG_INFINITY, m.depth).unwrap();
                    assert_eq!(full, lazy, "path {path} coord {coord}");
                    for level in [0.2, 0.8, 1.5] {
                        assert_eq!(w.exceeds(coord, level, m.depth), full > level);
                    }
                }
            }
        }
    }

    #[test]
    fn drivers_at_agrees_with_full_grid() {
        let key = key_from_seed(9);
        let m = model(DriftSchedule::null(1.0));
        let mut w = Walker::new(&m, &key);
        w.start(6);
        let grid = w.full_grid(m.depth);
        for k in [0u64, 1, 299, 512, 777, 1023, 1024] {
            assert_eq!(w.drivers_at(k, m.depth), grid[k as usize]);
        }
    }

    #[test]
    fn coarser_depth_is_a_subgrid() {
        let key = key_from_seed(1);
        let m = model(DriftSchedule::null(1.0));
        let mut w = Walker::new(&m, &key);
        w.start(0);
        let fine = w.full_grid(10);
        let coarse = w.full_grid(7);
        for (k, v) in coarse.iter().enumerate() {
            assert_eq!(*v, fine[k * 8]);
        }
    }
}
