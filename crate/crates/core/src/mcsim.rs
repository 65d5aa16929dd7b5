//! Closed-loop Monte Carlo checks of the reach-avoid sets.
//!
//! A [`TubeController`] steers a state in `RA_k` into `S_{k−1} = RA_{k−1} ⊖ E`,
//! which keeps every trajectory inside the tube as long as each realized
//! disturbance lies in `E`. [`simulate`] runs that controller under sampled
//! noise and reports the success rate with a Clopper–Pearson bound.
//!
//! Randomness comes from `ChaCha8Rng` seeded with `seed`, one stream per
//! trial index, so a report depends only on `(seed, trials, x0)`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use statrs::function::beta::inv_beta_reg;
use thiserror::Error;

use crate::geom::lp::{lp_solve, LpProblem, LpResult};
use crate::geom::{GeomError, HPolytope};
use crate::lagrangian::{DisturbanceSet, ReachError, ReachProblem, ReachResult};

/// Slack allowed when deciding whether a state lies in a tube set.
pub const TUBE_TOL: f64 = 1e-6;

/// Rejection-sampling attempts before giving up on drawing inside `E`.
const MAX_REJECTIONS: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("tube infeasibility at step {0}")]
    TubeInfeasible(usize),
    #[error("state outside RA_{0}")]
    OutsideTube(usize),
    #[error("step {0} outside 1..={1}")]
    BadStep(usize, usize),
    #[error("cannot draw a disturbance inside E")]
    RejectionFailed,
    #[error(transparent)]
    Reach(#[from] ReachError),
}

impl From<GeomError> for SimError {
    fn from(e: GeomError) -> Self {
        Self::Reach(e.into())
    }
}

/// Set-membership feedback built from a reach-avoid tube.
#[derive(Debug, Clone)]
pub struct TubeController {
    a: DMatrix<f64>,
    /// `B` times the points of `𝒰`; inputs are convex combinations of them.
    b_vertices: DMatrix<f64>,
    input_vertices: DMatrix<f64>,
    tube: Vec<HPolytope>,
    disturbance: DisturbanceSet,
    shrunk: Vec<HPolytope>,
    centers: Vec<DVector<f64>>,
}

impl TubeController {
    pub fn new(problem: &ReachProblem, result: &ReachResult) -> Result<Self, SimError> {
        let pts = problem.input.points();
        let input_vertices = DMatrix::from_fn(problem.input.dim(), pts.len(), |r, c| pts[c][r]);
        let b_vertices = problem.system.b() * &input_vertices;
        let mut shrunk = Vec::with_capacity(result.sets.len());
        let mut centers = Vec::with_capacity(result.sets.len());
        for set in &result.sets {
            let s = set.minkowski_diff(&result.disturbance)?;
            centers.push(s.chebyshev_center().center);
            shrunk.push(s);
        }
        Ok(Self {
            a: problem.system.a().clone(),
            b_vertices,
            input_vertices,
            tube: result.sets.clone(),
            disturbance: result.disturbance.clone(),
            shrunk,
            centers,
        })
    }

    pub fn horizon(&self) -> usize {
        self.tube.len() - 1
    }

    /// `RA_k`.
    pub fn tube(&self, k: usize) -> &HPolytope {
        &self.tube[k]
    }

    /// The set `E` the tube was built against.
    pub fn disturbance(&self) -> &DisturbanceSet {
        &self.disturbance
    }

    /// `S_k = RA_k ⊖ E`.
    pub fn shrunk(&self, k: usize) -> &HPolytope {
        &self.shrunk[k]
    }

    fn weights_to_input(&self, lambda: &[f64]) -> DVector<f64> {
        let l = DVector::from_column_slice(lambda);
        &self.input_vertices * l
    }

    /// Input for `x ∈ RA_k` (`k` steps to go) whose noise-free successor lies
    /// in `S_{k−1}` as close as possible, in the ∞-norm, to its Chebyshev
    /// center.
    pub fn control(&self, x: &DVector<f64>, k: usize) -> Result<DVector<f64>, SimError> {
        if k == 0 || k > self.horizon() {
            return Err(SimError::BadStep(k, self.horizon()));
        }
        if !self.tube[k].contains_tol(x, TUBE_TOL) {
            return Err(SimError::OutsideTube(k));
        }
        self.steer(x, k).ok_or(SimError::TubeInfeasible(k))
    }

    /// LP over `(λ, t)`: `u = Σ λ_i v_i`, `λ` in the simplex,
    /// `A x + B u ∈ S_{k−1}`, `|A x + B u − c|_∞ ≤ t`, minimizing `t`.
    fn steer(&self, x: &DVector<f64>, k: usize) -> Option<DVector<f64>> {
        let target = &self.shrunk[k - 1];
        let c = &self.centers[k - 1];
        let ax = &self.a * x;
        let n = ax.len();
        let p = self.b_vertices.ncols();
        let f = target.num_facets();
        let rows = f + 2 * n + p + 2;
        let mut a = DMatrix::zeros(rows, p + 1);
        let mut b = DVector::zeros(rows);
        let gb = target.a() * &self.b_vertices;
        a.view_mut((0, 0), (f, p)).copy_from(&gb);
        b.rows_mut(0, f).copy_from(&(target.b() - target.a() * &ax));
        for i in 0..n {
            for j in 0..p {
                a[(f + 2 * i, j)] = self.b_vertices[(i, j)];
                a[(f + 2 * i + 1, j)] = -self.b_vertices[(i, j)];
            }
            a[(f + 2 * i, p)] = -1.0;
            a[(f + 2 * i + 1, p)] = -1.0;
            b[f + 2 * i] = c[i] - ax[i];
            b[f + 2 * i + 1] = ax[i] - c[i];
        }
        let base = f + 2 * n;
        for j in 0..p {
            a[(base + j, j)] = -1.0;
            a[(base + p, j)] = 1.0;
            a[(base + p + 1, j)] = -1.0;
        }
        b[base + p] = 1.0;
        b[base + p + 1] = -1.0;
        let mut obj = DVector::zeros(p + 1);
        obj[p] = -1.0;
        match lp_solve(&LpProblem::new(obj, a, b)) {
            LpResult::Optimal { x: sol, .. } => Some(self.weights_to_input(&sol.as_slice()[..p])),
            _ => None,
        }
    }

    /// Input minimizing the largest violation of `A x + B u ∈ S_{k−1}`; used
    /// once noise has pushed the state out of the tube.
    pub fn recover(&self, x: &DVector<f64>, k: usize) -> DVector<f64> {
        let target = &self.shrunk[k - 1];
        let ax = &self.a * x;
        let p = self.b_vertices.ncols();
        let f = target.num_facets();
        let mut a = DMatrix::zeros(f + p + 2, p + 1);
        let mut b = DVector::zeros(f + p + 2);
        a.view_mut((0, 0), (f, p)).copy_from(&(target.a() * &self.b_vertices));
        a.view_mut((0, p), (f, 1)).fill(-1.0);
        b.rows_mut(0, f).copy_from(&(target.b() - target.a() * &ax));
        for j in 0..p {
            a[(f + j, j)] = -1.0;
            a[(f + p, j)] = 1.0;
            a[(f + p + 1, j)] = -1.0;
        }
        b[f + p] = 1.0;
        b[f + p + 1] = -1.0;
        let mut obj = DVector::zeros(p + 1);
        obj[p] = -1.0;
        match lp_solve(&LpProblem::new(obj, a, b)) {
            LpResult::Optimal { x: sol, .. } => self.weights_to_input(&sol.as_slice()[..p]),
            other => unreachable!("violation LP is always feasible and bounded: {other:?}"),
        }
    }

    /// [`control`](Self::control) inside the tube, [`recover`](Self::recover)
    /// outside it. The flag reports whether `x` was in `RA_k`.
    pub fn feedback(&self, x: &DVector<f64>, k: usize) -> Result<(DVector<f64>, bool), SimError> {
        if self.tube[k].contains_tol(x, TUBE_TOL) {
            Ok((self.control(x, k)?, true))
        } else {
            Ok((self.recover(x, k), false))
        }
    }
}

/// How disturbances are drawn in [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// The system's Gaussian disturbance.
    Gaussian,
    /// The Gaussian conditioned on landing in `E` (rejection sampling).
    InsideSet,
    /// No disturbance.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub x0: Vec<f64>,
    pub samples: u64,
    pub successes: u64,
    pub empirical: f64,
    /// Two-sided 95% Clopper–Pearson lower bound.
    pub lower_bound: f64,
    pub seed: u64,
    pub noise: NoiseMode,
    /// Trajectories that left the tube at some step.
    pub left_tube: u64,
}

/// Lower end of the exact two-sided binomial confidence interval at level
/// `confidence`.
pub fn clopper_pearson_lower(successes: u64, trials: u64, confidence: f64) -> f64 {
    assert!(successes <= trials && trials > 0);
    if successes == 0 {
        return 0.0;
    }
    let alpha = 1.0 - confidence;
    if successes == trials {
        return (alpha / 2.0).powf(1.0 / trials as f64);
    }
    inv_beta_reg(successes as f64, (trials - successes + 1) as f64, alpha / 2.0)
}

fn draw<R: Rng>(
    rng: &mut R,
    problem: &ReachProblem,
    l: &DMatrix<f64>,
    e: &DisturbanceSet,
    mode: NoiseMode,
) -> Result<DVector<f64>, SimError> {
    let d = problem.system.disturbance();
    let gaussian = |rng: &mut R| d.mean() + l * DVector::from_fn(d.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
    match mode {
        NoiseMode::Zero => Ok(DVector::zeros(d.dim())),
        NoiseMode::Gaussian => Ok(gaussian(rng)),
        NoiseMode::InsideSet => {
            for _ in 0..MAX_REJECTIONS {
                let w = gaussian(rng);
                if e.contains(&w) {
                    return Ok(w);
                }
            }
            Err(SimError::RejectionFailed)
        }
    }
}

/// Runs `trials` closed-loop trajectories from `x0 ∈ RA_N`. A trajectory
/// succeeds when `x_j ∈ 𝒦` for `j < N` and `x_N ∈ 𝒯`.
pub fn simulate(
    problem: &ReachProblem,
    ctrl: &TubeController,
    x0: &DVector<f64>,
    seed: u64,
    trials: u64,
    mode: NoiseMode,
) -> Result<SimReport, SimError> {
    let n = ctrl.horizon();
    if !ctrl.tube(n).contains_tol(x0, TUBE_TOL) {
        return Err(SimError::OutsideTube(n));
    }
    let l = problem.system.disturbance().cholesky_l();
    let e = ctrl.disturbance();
    let sys = &problem.system;
    let mut successes = 0;
    let mut left_tube = 0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let mut x = x0.clone();
        let mut ok = true;
        let mut in_tube = true;
        for j in 0..n {
            ok &= problem.safe.contains_tol(&x, TUBE_TOL);
            let (u, inside) = ctrl.feedback(&x, n - j)?;
            in_tube &= inside;
            let w = draw(&mut rng, problem, &l, e, mode)?;
            x = sys.step(&x, &u) + w;
        }
        ok &= problem.target.contains_tol(&x, TUBE_TOL);
        in_tube &= ctrl.tube(0).contains_tol(&x, TUBE_TOL);
        successes += u64::from(ok);
        left_tube += u64::from(!in_tube);
    }
    Ok(SimReport {
        x0: x0.as_slice().to_vec(),
        samples: trials,
        successes,
        empirical: successes as f64 / trials as f64,
        lower_bound: clopper_pearson_lower(successes, trials, 0.95),
        seed,
        noise: mode,
        left_tube,
    })
}

/// Hit-and-run samples from the interior of a bounded polytope: start at the
/// Chebyshev center, 50 burn-in moves, then one sample every 10 moves.
pub fn hit_and_run(set: &HPolytope, count: usize, seed: u64) -> Vec<DVector<f64>> {
    const BURN_IN: usize = 50;
    const THIN: usize = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = set.chebyshev_center().center;
    let d = set.dim();
    let mut out = Vec::with_capacity(count);
    let mut moves = 0;
    while out.len() < count {
        let dir = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let dir = dir.normalize();
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (a, b) in set.rows() {
            let rate = a.dot(&dir);
            let slack = b - a.dot(&x);
            if rate > 1e-14 {
                hi = hi.min(slack / rate);
            } else if rate < -1e-14 {
                lo = lo.max(slack / rate);
            }
        }
        if lo < hi {
            x += dir * rng.random_range(lo..hi);
        }
        moves += 1;
        if moves >= BURN_IN && (moves - BURN_IN).is_multiple_of(THIN) {
            out.push(x.clone());
        }
    }
    out
}
