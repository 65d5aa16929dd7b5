//! Grid dynamic programming on planar systems, used as a reference for the
//! polytopic sets.
//!
//! The stochastic recursion is
//!
//! ```text
//! V_N(x) = 1_𝒯(x)
//! V_k(x) = 1_𝒦(x) · max_u ∫ V_{k+1}(y) ψ(y − A x − B u) dy
//! ```
//!
//! and the robust one is the integer-valued minmax recursion
//!
//! ```text
//! J_t(x) = 1 − 1_𝒯(x)
//! J_k(x) = (1 − 1_𝒦(x)) + min_u max_{w ∈ E} J_{k+1}(A x + B u + w)
//! ```
//!
//! whose zero set is the robust reach-avoid set.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::geom::{HPolytope, Support, VPolytope, CONTAINS_TOL};
use crate::io::{fmt_f64, write_atomic};
use crate::lagrangian::ReachProblem;

/// Default number of input samples per input dimension.
pub const DEFAULT_INPUT_COUNT: usize = 21;

/// Kernel truncation in standard deviations.
const KERNEL_CUTOFF: f64 = 6.0;

#[derive(Debug, Error)]
pub enum DpError {
    #[error("DP oracle supports 2-D state only")]
    NotPlanar,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("step {0} outside the horizon")]
    StepOutOfRange(usize),
    #[error("failed to write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Uniform tensor grid over a planar box, boundary points included.
#[derive(Debug, Clone, PartialEq)]
pub struct StateGrid {
    lo: [f64; 2],
    hi: [f64; 2],
    counts: [usize; 2],
}

impl StateGrid {
    pub fn new(lo: [f64; 2], hi: [f64; 2], counts: [usize; 2]) -> Result<Self, DpError> {
        for d in 0..2 {
            if !lo[d].is_finite() || !hi[d].is_finite() || lo[d] >= hi[d] {
                return Err(DpError::InvalidGrid(format!("bad bounds [{}, {}] on axis {d}", lo[d], hi[d])));
            }
            if counts[d] < 2 {
                return Err(DpError::InvalidGrid(format!("axis {d} needs at least 2 points")));
            }
        }
        Ok(Self { lo, hi, counts })
    }

    /// `count × count` grid over the bounding box of `𝒦 ∪ 𝒯`.
    pub fn covering(problem: &ReachProblem, count: usize) -> Result<Self, DpError> {
        if problem.system.state_dim() != 2 {
            return Err(DpError::NotPlanar);
        }
        let (k_lo, k_hi) = problem.safe.bounding_box().ok_or_else(|| DpError::InvalidGrid("safe set".into()))?;
        let (t_lo, t_hi) = problem.target.bounding_box().ok_or_else(|| DpError::InvalidGrid("target set".into()))?;
        let lo = [k_lo[0].min(t_lo[0]), k_lo[1].min(t_lo[1])];
        let hi = [k_hi[0].max(t_hi[0]), k_hi[1].max(t_hi[1])];
        Self::new(lo, hi, [count, count])
    }

    pub fn lo(&self) -> [f64; 2] {
        self.lo
    }

    pub fn hi(&self) -> [f64; 2] {
        self.hi
    }

    pub fn counts(&self) -> [usize; 2] {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> [f64; 2] {
        [0, 1].map(|d| (self.hi[d] - self.lo[d]) / (self.counts[d] - 1) as f64)
    }

    pub fn cell_diagonal(&self) -> f64 {
        let [h1, h2] = self.spacing();
        h1.hypot(h2)
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        if i + 1 == self.counts[axis] {
            self.hi[axis]
        } else {
            self.lo[axis] + i as f64 * self.spacing()[axis]
        }
    }

    /// Flat index; the second coordinate varies fastest.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.counts[1] + j
    }

    pub fn point(&self, idx: usize) -> DVector<f64> {
        let (i, j) = (idx / self.counts[1], idx % self.counts[1]);
        DVector::from_vec(vec![self.coord(0, i), self.coord(1, j)])
    }

    pub fn points(&self) -> impl Iterator<Item = DVector<f64>> + '_ {
        (0..self.len()).map(|idx| self.point(idx))
    }

    /// Bilinear interpolation of grid `values` at `y`; `None` off the grid.
    pub fn interpolate(&self, values: &[f64], y: &[f64]) -> Option<f64> {
        let h = self.spacing();
        let mut base = [0usize; 2];
        let mut frac = [0.0; 2];
        for d in 0..2 {
            let t = (y[d] - self.lo[d]) / h[d];
            let last = (self.counts[d] - 1) as f64;
            if !(t >= -1e-9 && t <= last + 1e-9) {
                return None;
            }
            let t = t.clamp(0.0, last);
            let cell = (t.floor() as usize).min(self.counts[d] - 2);
            base[d] = cell;
            frac[d] = t - cell as f64;
        }
        let v = |di: usize, dj: usize| values[self.index(base[0] + di, base[1] + dj)];
        let (fx, fy) = (frac[0], frac[1]);
        Some(
            (1.0 - fx) * ((1.0 - fy) * v(0, 0) + fy * v(0, 1)) + fx * ((1.0 - fy) * v(1, 0) + fy * v(1, 1)),
        )
    }

    fn indicator(&self, set: &HPolytope) -> Vec<bool> {
        self.points().map(|p| set.contains_tol(&p, CONTAINS_TOL)).collect()
    }
}

/// `V_0 … V_N` over a grid, indexed by time.
#[derive(Debug, Clone)]
pub struct ValueGrid {
    pub grid: StateGrid,
    pub values: Vec<Vec<f64>>,
}

impl ValueGrid {
    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    /// `V_k` at time `k`.
    pub fn at_time(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    /// Interpolated `V_k(x)`, zero off the grid.
    pub fn interpolate(&self, k: usize, x: &[f64]) -> f64 {
        self.grid.interpolate(&self.values[k], x).unwrap_or(0.0)
    }

    pub fn to_csv(&self, k: usize) -> String {
        let mut out = String::from("x1,x2,V\n");
        for (idx, v) in self.values[k].iter().enumerate() {
            let p = self.grid.point(idx);
            writeln!(out, "{},{},{}", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(*v)).unwrap();
        }
        out
    }

    pub fn write_csv(&self, k: usize, path: &Path) -> Result<(), DpError> {
        write_atomic(path, self.to_csv(k).as_bytes())
            .map_err(|source| DpError::Io { path: path.display().to_string(), source })
    }
}

/// `J_0 … J_t` over a grid.
#[derive(Debug, Clone)]
pub struct RobustValueGrid {
    pub grid: StateGrid,
    pub values: Vec<Vec<u32>>,
}

impl RobustValueGrid {
    /// Grid points with `J_0 = 0`.
    pub fn zero_set(&self) -> Vec<bool> {
        self.values[0].iter().map(|&j| j == 0).collect()
    }
}

/// Input samples: a tensor grid over the bounding box of `𝒰`, restricted
/// to points of `𝒰`.
pub fn discretize_inputs(input: &VPolytope, count: usize) -> Vec<DVector<f64>> {
    let m = input.dim();
    if input.len() == 1 || count < 2 {
        return input.points().iter().take(1).cloned().collect();
    }
    let mut lo = vec![0.0; m];
    let mut hi = vec![0.0; m];
    for d in 0..m {
        let mut e = DVector::zeros(m);
        e[d] = 1.0;
        hi[d] = input.support(&e).expect("matching dimension");
        lo[d] = -input.support(&(-e)).expect("matching dimension");
    }
    let is_box = input.as_box().is_some();
    let total = count.pow(m as u32);
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let u = DVector::from_fn(m, |d, _| {
            let i = code % count;
            code /= count;
            lo[d] + (hi[d] - lo[d]) * i as f64 / (count - 1) as f64
        });
        if is_box || input.contains(&u) {
            out.push(u);
        }
    }
    out
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Weights `∫ φ_i(y) N(y; m, σ²) dy` of the piecewise-linear hat functions
/// on one grid axis, restricted to the axis range. Returns the first index
/// and the nonzero weights.
fn hat_weights(grid: &StateGrid, axis: usize, m: f64, sigma: f64, out: &mut Vec<f64>) -> usize {
    out.clear();
    let h = grid.spacing()[axis];
    let n = grid.counts[axis];
    let lo_y = (m - KERNEL_CUTOFF * sigma).max(grid.lo[axis]);
    let hi_y = (m + KERNEL_CUTOFF * sigma).min(grid.hi[axis]);
    if lo_y >= hi_y {
        return 0;
    }
    let first_cell = (((lo_y - grid.lo[axis]) / h).floor().max(0.0) as usize).min(n - 2);
    let last_cell = (((hi_y - grid.lo[axis]) / h).floor().max(0.0) as usize).min(n - 2);
    out.resize(last_cell - first_cell + 2, 0.0);
    for cell in first_cell..=last_cell {
        let a = grid.coord(axis, cell);
        let b = grid.coord(axis, cell + 1);
        let (za, zb) = ((a - m) / sigma, (b - m) / sigma);
        let i0 = std_normal_cdf(zb) - std_normal_cdf(za);
        // ∫_a^b (y − m) N(y; m, σ²) dy
        let i1 = sigma * (std_normal_pdf(za) - std_normal_pdf(zb));
        let k = cell - first_cell;
        out[k] += ((b - m) * i0 - i1) / (b - a);
        out[k + 1] += ((m - a) * i0 + i1) / (b - a);
    }
    first_cell
}

enum Transition {
    /// Independent coordinates: exact integration of the bilinear interpolant.
    Separable { sigma: [f64; 2] },
    /// Riemann sum over grid points inside the 6σ ellipse.
    Riemann { precision: DMatrix<f64>, norm: f64, reach: [usize; 2] },
}

impl Transition {
    fn new(cov: &DMatrix<f64>, grid: &StateGrid) -> Self {
        if cov[(0, 1)] == 0.0 && cov[(1, 0)] == 0.0 {
            return Self::Separable { sigma: [cov[(0, 0)].sqrt(), cov[(1, 1)].sqrt()] };
        }
        let precision = cov.clone().try_inverse().expect("covariance is positive definite");
        let h = grid.spacing();
        let norm = h[0] * h[1] / (2.0 * std::f64::consts::PI * cov.determinant().sqrt());
        let reach = [0, 1].map(|d| (KERNEL_CUTOFF * cov[(d, d)].sqrt() / h[d]).ceil() as usize + 1);
        Self::Riemann { precision, norm, reach }
    }

    /// `∫ V(y) ψ(y − m) dy` for grid values `v` extended by zero.
    fn expectation(&self, grid: &StateGrid, v: &[f64], m: &[f64; 2], scratch: &mut [Vec<f64>; 2]) -> f64 {
        match self {
            Self::Separable { sigma } => {
                let [w1, w2] = scratch;
                let i0 = hat_weights(grid, 0, m[0], sigma[0], w1);
                let j0 = hat_weights(grid, 1, m[1], sigma[1], w2);
                let mut total = 0.0;
                for (di, a) in w1.iter().enumerate() {
                    if *a == 0.0 {
                        continue;
                    }
                    let row = &v[grid.index(i0 + di, j0)..grid.index(i0 + di, j0) + w2.len()];
                    total += a * row.iter().zip(w2.iter()).map(|(x, y)| x * y).sum::<f64>();
                }
                total
            }
            Self::Riemann { precision, norm, reach } => {
                let h = grid.spacing();
                let ci = ((m[0] - grid.lo[0]) / h[0]).round() as i64;
                let cj = ((m[1] - grid.lo[1]) / h[1]).round() as i64;
                let mut total = 0.0;
                for i in (ci - reach[0] as i64).max(0)..=(ci + reach[0] as i64).min(grid.counts[0] as i64 - 1) {
                    for j in (cj - reach[1] as i64).max(0)..=(cj + reach[1] as i64).min(grid.counts[1] as i64 - 1) {
                        let (i, j) = (i as usize, j as usize);
                        let val = v[grid.index(i, j)];
                        if val == 0.0 {
                            continue;
                        }
                        let d = [grid.coord(0, i) - m[0], grid.coord(1, j) - m[1]];
                        let q = precision[(0, 0)] * d[0] * d[0]
                            + 2.0 * precision[(0, 1)] * d[0] * d[1]
                            + precision[(1, 1)] * d[1] * d[1];
                        if q <= KERNEL_CUTOFF * KERNEL_CUTOFF {
                            total += val * norm * (-0.5 * q).exp();
                        }
                    }
                }
                total
            }
        }
    }
}

/// Backward stochastic value recursion over `grid` for the problem horizon.
///
/// With independent noise coordinates the transition integral is evaluated
/// exactly for the bilinear interpolant of `V_{k+1}` (zero off the grid);
/// otherwise it is a truncated Riemann sum over grid points.
pub fn stochastic_dp(problem: &ReachProblem, grid: &StateGrid, input_count: usize) -> Result<ValueGrid, DpError> {
    let sys = &problem.system;
    if sys.state_dim() != 2 {
        return Err(DpError::NotPlanar);
    }
    let n = problem.horizon;
    let in_safe = grid.indicator(&problem.safe);
    let in_target = grid.indicator(&problem.target);
    let inputs = discretize_inputs(&problem.input, input_count);
    let bu: Vec<DVector<f64>> = inputs.iter().map(|u| sys.b() * u).collect();
    let kernel = Transition::new(sys.disturbance().covariance(), grid);
    let mean = sys.disturbance().mean();

    let mut values = vec![Vec::new(); n + 1];
    values[n] = in_target.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect();
    let mut scratch = [Vec::new(), Vec::new()];
    for k in (0..n).rev() {
        let next = &values[k + 1];
        let mut cur = vec![0.0; grid.len()];
        for (idx, slot) in cur.iter_mut().enumerate() {
            if !in_safe[idx] {
                continue;
            }
            let ax = sys.a() * grid.point(idx) + mean;
            let mut best = 0.0f64;
            for b in &bu {
                let m = [ax[0] + b[0], ax[1] + b[1]];
                best = best.max(kernel.expectation(grid, next, &m, &mut scratch));
                if best >= 1.0 {
                    break;
                }
            }
            *slot = best.clamp(0.0, 1.0);
        }
        values[k] = cur;
        log::debug!("stochastic DP step {k} done");
    }
    Ok(ValueGrid { grid: grid.clone(), values })
}

/// Grid points of `L_k(β) = { V_{N−k} ≥ β }` with `k` steps to go.
pub fn level_set_mask(vg: &ValueGrid, k: usize, beta: f64) -> Result<Vec<bool>, DpError> {
    let n = vg.horizon();
    if k > n {
        return Err(DpError::StepOutOfRange(k));
    }
    Ok(vg.values[n - k].iter().map(|&v| v >= beta).collect())
}

pub fn mask_to_csv(grid: &StateGrid, mask: &[bool]) -> String {
    let mut out = String::from("x1,x2,inside\n");
    for (idx, m) in mask.iter().enumerate() {
        let p = grid.point(idx);
        writeln!(out, "{},{},{}", fmt_f64(p[0]), fmt_f64(p[1]), u8::from(*m)).unwrap();
    }
    out
}

/// Robust minmax recursion for `t` steps against the finite disturbance
/// sample `e` (its points and their centroid).
///
/// `J_{k+1}` is interpolated bilinearly and successors off the grid take the
/// largest possible cost; `min_u max_w` is rounded to an integer with ties
/// going up.
pub fn robust_dp(
    problem: &ReachProblem,
    e: &VPolytope,
    grid: &StateGrid,
    input_count: usize,
    t: usize,
) -> Result<RobustValueGrid, DpError> {
    let sys = &problem.system;
    if sys.state_dim() != 2 || e.dim() != 2 {
        return Err(DpError::NotPlanar);
    }
    let in_safe = grid.indicator(&problem.safe);
    let in_target = grid.indicator(&problem.target);
    let inputs = discretize_inputs(&problem.input, input_count);
    let bu: Vec<DVector<f64>> = inputs.iter().map(|u| sys.b() * u).collect();
    let mut ws: Vec<DVector<f64>> = e.points().to_vec();
    ws.extend(e.centroid());

    let mut values: Vec<Vec<u32>> = vec![Vec::new(); t + 1];
    values[t] = in_target.iter().map(|&x| u32::from(!x)).collect();
    for k in (0..t).rev() {
        let next: Vec<f64> = values[k + 1].iter().map(|&j| j as f64).collect();
        let off_grid = (t - k) as f64;
        let mut cur = vec![0u32; grid.len()];
        for (idx, slot) in cur.iter_mut().enumerate() {
            let ax = sys.a() * grid.point(idx);
            let mut best = f64::INFINITY;
            for b in &bu {
                let mut worst = f64::NEG_INFINITY;
                for w in &ws {
                    let y = [ax[0] + b[0] + w[0], ax[1] + b[1] + w[1]];
                    worst = worst.max(grid.interpolate(&next, &y).unwrap_or(off_grid));
                    if worst >= best {
                        break;
                    }
                }
                best = best.min(worst);
                if best == 0.0 {
                    break;
                }
            }
            let rounded = (best - 0.5 + 1e-9).ceil().max(0.0) as u32;
            *slot = rounded + u32::from(!in_safe[idx]);
        }
        values[k] = cur;
    }
    Ok(RobustValueGrid { grid: grid.clone(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::{robust_reach_avoid, viability, DisturbanceSet};
    use crate::prob::GaussianDisturbance;
    use crate::systems::{double_integrator, DoubleIntegratorParams};

    fn di(variance: f64) -> ReachProblem {
        double_integrator(&DoubleIntegratorParams { variance, ..Default::default() }).unwrap()
    }

    #[test]
    fn grid_geometry() {
        let g = StateGrid::new([-1.0, -1.0], [1.0, 1.0], [41, 41]).unwrap();
        assert_eq!(g.len(), 1681);
        assert!((g.spacing()[0] - 0.05).abs() < 1e-15);
        assert_eq!(g.point(g.index(40, 0)).as_slice(), &[1.0, -1.0]);
        assert!(StateGrid::new([0.0, 0.0], [1.0, 1.0], [1, 3]).is_err());
        assert!(StateGrid::new([0.0, 0.0], [0.0, 1.0], [3, 3]).is_err());
    }

    #[test]
    fn interpolation_reproduces_bilinear_functions() {
        let g = StateGrid::new([-1.0, 0.0], [1.0, 2.0], [5, 7]).unwrap();
        let f = |x: f64, y: f64| 1.0 + 2.0 * x - y + 0.5 * x * y;
        let vals: Vec<f64> = g.points().map(|p| f(p[0], p[1])).collect();
        for y in [[0.3, 0.7], [-1.0, 2.0], [0.99, 0.01], [1.0, 1.0]] {
            assert!((g.interpolate(&vals, &y).unwrap() - f(y[0], y[1])).abs() < 1e-12);
        }
        assert!(g.interpolate(&vals, &[1.1, 0.0]).is_none());
    }

    #[test]
    fn hat_weights_sum_to_mass_inside() {
        let g = StateGrid::new([-1.0, -1.0], [1.0, 1.0], [41, 41]).unwrap();
        let mut w = Vec::new();
        for (m, sigma) in [(0.0, 0.07), (0.013, 0.003), (0.9, 0.1)] {
            hat_weights(&g, 0, m, sigma, &mut w);
            let inside = std_normal_cdf((1.0 - m) / sigma) - std_normal_cdf((-1.0 - m) / sigma);
            assert!((w.iter().sum::<f64>() - inside).abs() < 1e-8, "m={m} σ={sigma}");
        }
    }

    #[test]
    fn hat_weights_reproduce_linear_means() {
        // Hat functions interpolate linear functions exactly, so Σ x_i w_i = m.
        let g = StateGrid::new([-1.0, -1.0], [1.0, 1.0], [41, 41]).unwrap();
        let mut w = Vec::new();
        let first = hat_weights(&g, 0, 0.123, 0.02, &mut w);
        let mean: f64 = w.iter().enumerate().map(|(k, wk)| wk * g.coord(0, first + k)).sum();
        assert!((mean - 0.123).abs() < 1e-10);
    }

    #[test]
    fn inputs_cover_interval() {
        let u = discretize_inputs(&VPolytope::from_box(&[-1.0], &[1.0]).unwrap(), 21);
        assert_eq!(u.len(), 21);
        assert_eq!(u[0][0], -1.0);
        assert!((u[10][0]).abs() < 1e-15);
        let tri = VPolytope::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(discretize_inputs(&tri, 3).len(), 6);
    }

    #[test]
    fn terminal_slice_is_target_indicator() {
        let p = di(0.005);
        let g = StateGrid::covering(&p, 21).unwrap();
        let vg = stochastic_dp(&p, &g, 5).unwrap();
        assert!(vg.values[5].iter().all(|&v| v == 1.0));
        assert_eq!(level_set_mask(&vg, 0, 0.0).unwrap(), vec![true; g.len()]);
        assert!(level_set_mask(&vg, 6, 0.5).is_err());
        for vals in &vg.values {
            assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn thresholds_are_monotone() {
        let p = di(0.005);
        let g = StateGrid::covering(&p, 21).unwrap();
        let vg = stochastic_dp(&p, &g, 11).unwrap();
        let lo = level_set_mask(&vg, 5, 0.5).unwrap();
        let hi = level_set_mask(&vg, 5, 0.9).unwrap();
        assert!(hi.iter().zip(&lo).all(|(h, l)| !h || *l));
        assert!(hi.iter().any(|&h| h));
    }

    #[test]
    fn correlated_noise_uses_riemann_sum() {
        let mut p = di(0.005);
        let cov = DMatrix::from_row_slice(2, 2, &[0.005, 0.002, 0.002, 0.005]);
        p = p.with_disturbance(GaussianDisturbance::new(DVector::zeros(2), cov).unwrap()).unwrap();
        let g = StateGrid::covering(&p, 41).unwrap();
        let vg = stochastic_dp(&p, &g, 11).unwrap();
        let center = vg.interpolate(0, &[0.0, 0.0]);
        assert!(center > 0.9 && center <= 1.0, "{center}");
    }

    #[test]
    fn zero_variance_matches_viability() {
        let p = di(1e-8);
        let g = StateGrid::covering(&p, 41).unwrap();
        let vg = stochastic_dp(&p, &g, 21).unwrap();
        let viab = viability(&p, 5).unwrap();
        let set = viab.last();
        let diag = g.cell_diagonal();
        for (idx, x) in g.points().enumerate() {
            let depth = set.depth(&x);
            let v = vg.values[0][idx];
            if depth > diag {
                assert!(v > 0.99, "interior point {x} has V = {v}");
            } else if depth < -diag {
                assert!(v < 0.01, "exterior point {x} has V = {v}");
            }
        }
    }

    #[test]
    fn robust_dp_trivial_cases() {
        let p = di(0.005);
        let g = StateGrid::covering(&p, 21).unwrap();
        let origin = VPolytope::new(2, vec![DVector::zeros(2)]).unwrap();
        let r = robust_dp(&p, &origin, &g, 11, 0).unwrap();
        assert!(r.values[0].iter().all(|&j| j == 0));

        // A grid reaching beyond 𝒦: far points accrue stage cost.
        let wide = StateGrid::new([-2.0, -2.0], [2.0, 2.0], [21, 21]).unwrap();
        let r = robust_dp(&p, &origin, &wide, 11, 3).unwrap();
        assert!(r.values[0][0] >= 1);
        assert!(r.values[0].iter().all(|&j| j <= 4));
    }

    #[test]
    fn robust_zero_set_tracks_polytope() {
        let p = di(0.005);
        let e = p.system.disturbance().level_set(p.per_step_mass()).unwrap();
        let poly = e.boundary_points(16);
        let g = StateGrid::covering(&p, 41).unwrap();
        let r = robust_dp(&p, &poly, &g, 21, 3).unwrap();
        let ra = robust_reach_avoid(&p, &DisturbanceSet::Polytope(poly), 3).unwrap();
        let zero = r.zero_set();
        let diag = g.cell_diagonal();
        for (idx, x) in g.points().enumerate() {
            let depth = ra.last().depth(&x);
            if depth.abs() > diag {
                assert_eq!(zero[idx], depth > 0.0, "at {x}");
            }
        }
    }

    #[test]
    fn csv_layout() {
        let p = di(0.005);
        let g = StateGrid::covering(&p, 3).unwrap();
        let vg = stochastic_dp(&p, &g, 3).unwrap();
        let csv = vg.to_csv(5);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x1,x2,V");
        assert_eq!(lines.len(), 10);
        let first: Vec<f64> = lines[1].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(first, vec![-1.0, -1.0, 1.0]);
    }
}
