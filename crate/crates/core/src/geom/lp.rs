//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! The public entry point [`lp_solve`] handles problems of the form
//! `maximize cᵀx subject to A x ≤ b` with `x` free. Every problem in this
//! crate has few variables (the state dimension, at most a handful) and many
//! constraints, so the solver works on the dual standard form
//! `maximize −bᵀy subject to Aᵀy = c, y ≥ 0`, whose tableau has only `n + 1`
//! rows. The primal optimum is recovered from the dual multipliers.

use nalgebra::{DMatrix, DVector};

/// Tolerance on the phase-one objective below which the problem is feasible.
pub const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
/// Reduced cost above which a column without a pivot row is a true ray.
const RAY_TOL: f64 = 1e-7;
const RHS_SNAP: f64 = 1e-13;

/// `maximize objectiveᵀ x` subject to `constraints · x ≤ rhs`, `x` free.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: DVector<f64>,
    pub constraints: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal { x: DVector<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpResult::Optimal { .. })
    }
}

impl LpProblem {
    pub fn new(objective: DVector<f64>, constraints: DMatrix<f64>, rhs: DVector<f64>) -> Self {
        assert_eq!(constraints.ncols(), objective.len(), "objective length must match columns");
        assert_eq!(constraints.nrows(), rhs.len(), "rhs length must match rows");
        Self { objective, constraints, rhs }
    }

    pub fn solve(&self) -> LpResult {
        lp_solve(self)
    }
}

/// Solves `max cᵀx s.t. Ax ≤ b` with free `x`.
pub fn lp_solve(p: &LpProblem) -> LpResult {
    let n = p.objective.len();
    let m = p.rhs.len();
    if n == 0 {
        return if p.rhs.iter().all(|&bi| bi >= -FEAS_TOL) {
            LpResult::Optimal { x: DVector::zeros(0), value: 0.0 }
        } else {
            LpResult::Infeasible
        };
    }

    // Dual: rows = n equality constraints Aᵀy = c, columns = m multipliers.
    let mut at = vec![0.0; n * m];
    for j in 0..m {
        for i in 0..n {
            at[i * m + j] = p.constraints[(j, i)];
        }
    }
    let neg_b: Vec<f64> = p.rhs.iter().map(|v| -v).collect();
    let c: Vec<f64> = p.objective.iter().copied().collect();

    match simplex_standard(&neg_b, &at, &c, n, m) {
        StdOutcome::Optimal { duals } => {
            let x = DVector::from_iterator(n, duals.iter().map(|v| -v));
            let value = p.objective.dot(&x);
            LpResult::Optimal { x, value }
        }
        StdOutcome::Unbounded => LpResult::Infeasible,
        StdOutcome::Infeasible => {
            // Dual infeasible: primal is either unbounded or infeasible.
            let zeros = vec![0.0; n];
            match simplex_standard(&neg_b, &at, &zeros, n, m) {
                StdOutcome::Unbounded => LpResult::Infeasible,
                _ => LpResult::Unbounded,
            }
        }
    }
}

#[derive(Debug)]
pub(crate) enum StdOutcome {
    Optimal { duals: Vec<f64> },
    Infeasible,
    Unbounded,
}

/// Revised simplex over `[A | I]` (one artificial column per row). The
/// basis matrix is refactored from the original data at every iteration;
/// with only a handful of rows this costs no more than a tableau pivot and
/// keeps rounding error from accumulating on near-degenerate problems.
struct Revised<'a> {
    rows: usize,
    cols: usize,
    /// Row-major `rows × cols`, rows equilibrated and signed so `b ≥ 0`.
    a: &'a [f64],
    b: &'a [f64],
    basis: Vec<usize>,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Revised<'_> {
    fn column(&self, j: usize, out: &mut DVector<f64>) {
        for r in 0..self.rows {
            out[r] = if j < self.cols { self.a[r * self.cols + j] } else { f64::from(u8::from(j - self.cols == r)) };
        }
    }

    fn basis_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.rows);
        let mut col = DVector::zeros(self.rows);
        for (k, &j) in self.basis.iter().enumerate() {
            self.column(j, &mut col);
            m.set_column(k, &col);
        }
        m
    }

    /// Runs Bland's rule for costs `cost(j)`; columns `≥ enter_limit` never
    /// enter. Returns the final duals `B⁻ᵀ c_B` on optimality.
    fn run(&mut self, cost: &dyn Fn(usize) -> f64, enter_limit: usize) -> (Step, DVector<f64>) {
        let max_iter = 10_000 + 50 * (self.rows + self.cols);
        let mut col = DVector::zeros(self.rows);
        let cmax = (0..enter_limit).map(|j| cost(j).abs()).fold(1.0, f64::max);
        for _ in 0..max_iter {
            let bm = self.basis_matrix();
            let lut = bm.transpose().lu();
            let lu = bm.lu();
            let mut xb = lu.solve(&DVector::from_column_slice(self.b)).expect("basis stays nonsingular");
            for v in xb.iter_mut() {
                if v.abs() < RHS_SNAP {
                    *v = 0.0;
                }
            }
            let cb = DVector::from_iterator(self.rows, self.basis.iter().map(|&j| cost(j)));
            let duals = lut.solve(&cb).expect("basis stays nonsingular");
            // Bland: the first improving column that has a pivot row. A
            // column with no pivot row is a ray unless its reduced cost is
            // at rounding level, in which case it is passed over.
            let mut chosen = None;
            for j in 0..enter_limit {
                if self.basis.contains(&j) {
                    continue;
                }
                self.column(j, &mut col);
                let rc = cost(j) - duals.dot(&col);
                if rc <= OPT_TOL * cmax {
                    continue;
                }
                let dir = lu.solve(&col).expect("basis stays nonsingular");
                let piv_tol = (PIVOT_TOL * dir.amax()).max(PIVOT_TOL);
                let theta = (0..self.rows)
                    .filter(|&r| dir[r] > piv_tol)
                    .map(|r| xb[r].max(0.0) / dir[r])
                    .fold(f64::INFINITY, f64::min);
                if theta < f64::INFINITY {
                    chosen = Some((j, dir, piv_tol, theta));
                    break;
                }
                if rc > RAY_TOL * cmax {
                    return (Step::Unbounded, duals);
                }
            }
            let Some((pc, dir, piv_tol, theta)) = chosen else {
                return (Step::Optimal, duals);
            };
            let slack = 1e-12 * (1.0 + theta);
            let pr = (0..self.rows)
                .filter(|&r| dir[r] > piv_tol && xb[r].max(0.0) / dir[r] <= theta + slack)
                .min_by_key(|&r| self.basis[r])
                .expect("a row attains the minimum ratio");
            self.basis[pr] = pc;
        }
        panic!("simplex iteration limit exceeded");
    }
}

/// `maximize cᵀy s.t. A y = b, y ≥ 0`; `a` is row-major `rows × cols`.
/// The returned duals `π` satisfy `Aᵀπ ≥ c` at optimality.
pub(crate) fn simplex_standard(c: &[f64], a: &[f64], b: &[f64], rows: usize, cols: usize) -> StdOutcome {
    debug_assert_eq!(a.len(), rows * cols);
    // Rows are equilibrated to unit max-norm and flipped so that b ≥ 0;
    // `sign` carries both factors back to the duals.
    let mut sign = vec![1.0; rows];
    let mut sa = vec![0.0; rows * cols];
    let mut sb = vec![0.0; rows];
    for r in 0..rows {
        let row = &a[r * cols..(r + 1) * cols];
        let scale = row.iter().fold(b[r].abs(), |m, v| m.max(v.abs()));
        let scale = if scale > 0.0 { 1.0 / scale } else { 1.0 };
        sign[r] = if b[r] < 0.0 { -scale } else { scale };
        for j in 0..cols {
            sa[r * cols + j] = sign[r] * row[j];
        }
        sb[r] = sign[r] * b[r];
    }
    let total = cols + rows;
    let mut s = Revised { rows, cols, a: &sa, b: &sb, basis: (cols..total).collect() };

    // Phase one: maximize −Σ artificials.
    let phase_one = |j: usize| if j >= cols { -1.0 } else { 0.0 };
    s.run(&phase_one, total);
    let lu = s.basis_matrix().lu();
    let xb = lu.solve(&DVector::from_column_slice(&sb)).expect("basis stays nonsingular");
    let infeas: f64 = s.basis.iter().zip(xb.iter()).filter(|(&j, _)| j >= cols).map(|(_, v)| v.max(0.0)).sum();
    if infeas > FEAS_TOL {
        return StdOutcome::Infeasible;
    }

    // Drive basic artificials out where possible.
    let mut col = DVector::zeros(rows);
    for r in 0..rows {
        if s.basis[r] < cols {
            continue;
        }
        let lut = s.basis_matrix().transpose().lu();
        let mut e = DVector::zeros(rows);
        e[r] = 1.0;
        let row = lut.solve(&e).expect("basis stays nonsingular");
        if let Some(j) = (0..cols).filter(|j| !s.basis.contains(j)).find(|&j| {
            s.column(j, &mut col);
            row.dot(&col).abs() > 1e-9
        }) {
            s.basis[r] = j;
        }
    }

    let phase_two = |j: usize| if j < cols { c[j] } else { 0.0 };
    match s.run(&phase_two, cols) {
        (Step::Unbounded, _) => StdOutcome::Unbounded,
        (Step::Optimal, duals) => StdOutcome::Optimal { duals: (0..rows).map(|r| sign[r] * duals[r]).collect() },
    }
}

/// Checks whether `point` lies in the convex hull of `points` by solving the
/// barycentric feasibility problem.
pub(crate) fn in_convex_hull(points: &[DVector<f64>], point: &DVector<f64>) -> bool {
    if points.is_empty() {
        return false;
    }
    let dim = point.len();
    let k = points.len();
    let rows = dim + 1;
    let mut a = vec![0.0; rows * k];
    for (j, p) in points.iter().enumerate() {
        for i in 0..dim {
            a[i * k + j] = p[i];
        }
        a[dim * k + j] = 1.0;
    }
    let mut b: Vec<f64> = point.iter().copied().collect();
    b.push(1.0);
    let c = vec![0.0; k];
    matches!(simplex_standard(&c, &a, &b, rows, k), StdOutcome::Optimal { .. })
}
