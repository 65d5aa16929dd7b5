//! Backward recursion for robust reach-avoid sets of
//! `x⁺ = A x + B u + w`, `u ∈ 𝒰`, `w ∈ E`:
//!
//! ```text
//! RA_0 = 𝒯
//! RA_k = 𝒦 ∩ Reach⁻(RA_{k−1} ⊖ E),   Reach⁻(S) = A⁻¹ (S ⊕ (−B 𝒰))
//! ```
//!
//! With `E` the Gaussian level set of mass `β^{1/N}`, every state of `RA_N`
//! meets the stochastic reach-avoid objective with probability at least `β`.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Ellipsoid, GeomError, HPolytope, Support, VPolytope};
use crate::prob::{GaussianDisturbance, ProbError};

/// Facets whose unit normals are closer than this are merged (conservatively)
/// after every step; slivers below this scale only destabilize enumeration.
pub const PARALLEL_TOL: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReachError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("invalid problem: {0}")]
    Invalid(String),
}

/// `x⁺ = A x + B u + w` with Gaussian `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    disturbance: GaussianDisturbance,
}

impl LinearSystem {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, disturbance: GaussianDisturbance) -> Result<Self, ReachError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(ReachError::Invalid(format!("A must be square, got {}x{}", n, a.ncols())));
        }
        if b.nrows() != n {
            return Err(ReachError::Invalid(format!("B has {} rows, expected {n}", b.nrows())));
        }
        if disturbance.dim() != n {
            return Err(ReachError::Invalid(format!(
                "disturbance dimension {} differs from state dimension {n}",
                disturbance.dim()
            )));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(GeomError::NonFinite.into());
        }
        let sv = a.clone().singular_values();
        if sv.min() <= 0.0 || sv.max() / sv.min() > 1e12 {
            return Err(GeomError::SingularMatrix.into());
        }
        Ok(Self { a, b, disturbance })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn disturbance(&self) -> &GaussianDisturbance {
        &self.disturbance
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    /// Noise-free successor `A x + B u`.
    pub fn step(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        &self.a * x + &self.b * u
    }

    pub fn with_disturbance(&self, disturbance: GaussianDisturbance) -> Result<Self, ReachError> {
        Self::new(self.a.clone(), self.b.clone(), disturbance)
    }
}

/// Safe set, target set, input set, probability level and horizon for one
/// linear system.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachProblem {
    pub system: LinearSystem,
    pub safe: HPolytope,
    pub target: HPolytope,
    pub input: VPolytope,
    pub beta: f64,
    pub horizon: usize,
}

impl ReachProblem {
    pub fn new(
        system: LinearSystem,
        safe: HPolytope,
        target: HPolytope,
        input: VPolytope,
        beta: f64,
        horizon: usize,
    ) -> Result<Self, ReachError> {
        let n = system.state_dim();
        for (name, set) in [("safe", &safe), ("target", &target)] {
            if set.dim() != n {
                return Err(ReachError::Invalid(format!("{name} set has dimension {}, expected {n}", set.dim())));
            }
            if set.is_empty() {
                return Err(ReachError::Invalid(format!("{name} set is empty")));
            }
            if set.bounding_box().is_none() {
                return Err(ReachError::Invalid(format!("{name} set is unbounded")));
            }
        }
        if input.dim() != system.input_dim() {
            return Err(ReachError::Invalid(format!(
                "input set has dimension {}, expected {}",
                input.dim(),
                system.input_dim()
            )));
        }
        if input.is_empty() {
            return Err(ReachError::Invalid("input set is empty".into()));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(ReachError::Invalid(format!("beta must lie in [0, 1], got {beta}")));
        }
        if horizon == 0 {
            return Err(ReachError::Invalid("horizon must be positive".into()));
        }
        Ok(Self { system, safe, target, input, beta, horizon })
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self, ReachError> {
        Self::new(self.system.clone(), self.safe.clone(), self.target.clone(), self.input.clone(), beta, self.horizon)
    }

    pub fn with_horizon(&self, horizon: usize) -> Result<Self, ReachError> {
        Self::new(self.system.clone(), self.safe.clone(), self.target.clone(), self.input.clone(), self.beta, horizon)
    }

    pub fn with_disturbance(&self, d: GaussianDisturbance) -> Result<Self, ReachError> {
        Self::new(
            self.system.with_disturbance(d)?,
            self.safe.clone(),
            self.target.clone(),
            self.input.clone(),
            self.beta,
            self.horizon,
        )
    }

    /// Probability mass required of the per-step disturbance set.
    pub fn per_step_mass(&self) -> f64 {
        self.beta.powf(1.0 / self.horizon as f64)
    }
}

/// The bounded disturbance set subtracted at each step.
#[derive(Debug, Clone, PartialEq)]
pub enum DisturbanceSet {
    Ellipsoid(Ellipsoid),
    Polytope(VPolytope),
}

impl DisturbanceSet {
    /// `{0}` in `dim` dimensions.
    pub fn origin(dim: usize) -> Self {
        Self::Ellipsoid(Ellipsoid::point(DVector::zeros(dim)))
    }

    pub fn contains(&self, w: &DVector<f64>) -> bool {
        match self {
            Self::Ellipsoid(e) => e.contains(w),
            Self::Polytope(p) => p.contains(w),
        }
    }
}

impl Support for DisturbanceSet {
    fn dim(&self) -> usize {
        match self {
            Self::Ellipsoid(e) => Support::dim(e),
            Self::Polytope(p) => Support::dim(p),
        }
    }

    fn support(&self, direction: &DVector<f64>) -> Result<f64, GeomError> {
        match self {
            Self::Ellipsoid(e) => e.support(direction),
            Self::Polytope(p) => p.support(direction),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub step: usize,
    pub facets: usize,
    /// `None` when the set is empty.
    pub vertices: Option<usize>,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct ReachResult {
    /// `RA_0 … RA_t`.
    pub sets: Vec<HPolytope>,
    pub disturbance: DisturbanceSet,
    pub diagnostics: Vec<StepDiagnostics>,
    /// First step whose set is empty, if any.
    pub empty_from: Option<usize>,
}

impl ReachResult {
    pub fn horizon(&self) -> usize {
        self.sets.len() - 1
    }

    /// The set for `k` remaining steps.
    pub fn set(&self, k: usize) -> &HPolytope {
        &self.sets[k]
    }

    pub fn last(&self) -> &HPolytope {
        self.sets.last().expect("RA_0 is always present")
    }

    pub fn total_seconds(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.seconds).sum()
    }
}

/// `Reach⁻(S) = A⁻¹ (S ⊕ (−B 𝒰))`: states with some admissible input whose
/// noise-free successor lies in `S`.
pub fn backward_reach(sys: &LinearSystem, input: &VPolytope, s: &HPolytope) -> Result<HPolytope, ReachError> {
    let n = sys.state_dim();
    if s.dim() != n {
        return Err(GeomError::DimensionMismatch { expected: n, found: s.dim() }.into());
    }
    if s.is_empty() {
        return Ok(HPolytope::empty(n));
    }
    let sum = match input.as_box() {
        // −B𝒰 is a zonotope: center −B·mid, generators B·e_i·halfwidth_i.
        Some((lo, hi)) => {
            let mid = DVector::from_fn(lo.len(), |i, _| 0.5 * (lo[i] + hi[i]));
            let gens: Vec<DVector<f64>> =
                (0..lo.len()).map(|i| sys.b().column(i) * (0.5 * (hi[i] - lo[i]))).collect();
            s.translate(&-(sys.b() * mid))?.minkowski_sum_segments(&gens)?
        }
        None => {
            let shift = input.linear_map(&(-sys.b()))?;
            VPolytope::new(n, s.vertices()?.pairwise_sums(&shift)?)?.facets()?
        }
    };
    Ok(sum.affine_preimage(sys.a())?)
}

fn diagnostics(step: usize, set: &HPolytope, started: Instant) -> StepDiagnostics {
    let vertices = if set.is_empty() { None } else { set.vertices().ok().map(|v| v.len()) };
    StepDiagnostics { step, facets: set.num_facets(), vertices, seconds: started.elapsed().as_secs_f64() }
}

/// Runs the recursion for `t` steps against the disturbance set `e`.
pub fn robust_reach_avoid(problem: &ReachProblem, e: &DisturbanceSet, t: usize) -> Result<ReachResult, ReachError> {
    let n = problem.system.state_dim();
    if e.dim() != n {
        return Err(GeomError::DimensionMismatch { expected: n, found: e.dim() }.into());
    }
    let started = Instant::now();
    let mut sets = vec![problem.target.reduce()];
    let mut diags = vec![diagnostics(0, &sets[0], started)];
    let mut empty_from = sets[0].is_empty().then_some(0);
    for k in 1..=t {
        let started = Instant::now();
        let next = if empty_from.is_some() {
            HPolytope::empty(n)
        } else {
            let shrunk = sets[k - 1].minkowski_diff(e)?;
            match backward_reach(&problem.system, &problem.input, &shrunk) {
                Ok(pre) => problem.safe.intersect(&pre)?.merge_near_parallel(PARALLEL_TOL)?,
                Err(ReachError::Geom(GeomError::NotFullDimensional)) => {
                    log::warn!("step {k}: intermediate set is flat, treating it as empty");
                    HPolytope::empty(n)
                }
                Err(err) => return Err(err),
            }
        };
        if empty_from.is_none() && next.is_empty() {
            log::info!("robust reach-avoid set empty from step {k}");
            empty_from = Some(k);
        }
        diags.push(diagnostics(k, &next, started));
        sets.push(next);
    }
    Ok(ReachResult { sets, disturbance: e.clone(), diagnostics: diags, empty_from })
}

/// Finite-horizon viable sets: the recursion with `𝒯 = 𝒦` and `E = {0}`.
pub fn viability(problem: &ReachProblem, t: usize) -> Result<ReachResult, ReachError> {
    let p = ReachProblem { target: problem.safe.clone(), ..problem.clone() };
    robust_reach_avoid(&p, &DisturbanceSet::origin(problem.system.state_dim()), t)
}

/// Sizes `E` as the Gaussian level set of mass `β^{1/N}` and runs the
/// recursion for `N` steps; `RA_N` underapproximates the `β` level set.
pub fn underapproximate_level_set(problem: &ReachProblem) -> Result<ReachResult, ReachError> {
    if problem.beta >= 1.0 {
        return Err(ProbError::UnreachableConfidence(problem.beta).into());
    }
    let e = problem.system.disturbance().level_set(problem.per_step_mass())?;
    robust_reach_avoid(problem, &DisturbanceSet::Ellipsoid(e), problem.horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::lp::{lp_solve, LpProblem, LpResult};
    use crate::systems::{double_integrator, DoubleIntegratorParams};
    use nalgebra::{dmatrix, dvector};

    fn identity_problem(input: VPolytope) -> ReachProblem {
        let sys = LinearSystem::new(
            DMatrix::identity(2, 2),
            DMatrix::identity(2, 2),
            GaussianDisturbance::isotropic(2, 0.01).unwrap(),
        )
        .unwrap();
        let k = HPolytope::from_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        ReachProblem::new(sys, k.clone(), k, input, 0.8, 3).unwrap()
    }

    #[test]
    fn autonomous_identity_reach_is_identity() {
        let p = identity_problem(VPolytope::new(2, vec![dvector![0.0, 0.0]]).unwrap());
        let s = HPolytope::from_box(&[-0.3, -0.2], &[0.1, 0.4]).unwrap();
        let r = backward_reach(&p.system, &p.input, &s).unwrap();
        assert!(r.set_eq_tol(&s, 1e-12).unwrap());
    }

    #[test]
    fn scaling_reach() {
        let sys = LinearSystem::new(
            DMatrix::identity(2, 2) * 2.0,
            DMatrix::zeros(2, 1),
            GaussianDisturbance::isotropic(2, 1.0).unwrap(),
        )
        .unwrap();
        let s = HPolytope::from_box(&[-2.0, -2.0], &[2.0, 2.0]).unwrap();
        let input = VPolytope::from_box(&[-1.0], &[1.0]).unwrap();
        let r = backward_reach(&sys, &input, &s).unwrap();
        assert!(r.set_eq_tol(&HPolytope::from_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap(), 1e-12).unwrap());
    }

    #[test]
    fn box_inputs_match_hull_path() {
        let sys = LinearSystem::new(
            dmatrix![1.0, 0.2, 0.0; 0.1, 0.9, 0.3; 0.0, -0.2, 1.1],
            dmatrix![1.0, 0.0; 0.5, 1.0; 0.0, -0.4],
            GaussianDisturbance::isotropic(3, 0.01).unwrap(),
        )
        .unwrap();
        let input = VPolytope::from_box(&[-0.2, 0.0], &[0.3, 0.1]).unwrap();
        let s = HPolytope::new(
            dmatrix![1.0, 0.0, 0.0; -1.0, 0.0, 0.0; 0.0, 1.0, 0.0; 0.0, -1.0, 0.0; 0.0, 0.0, 1.0; 0.0, 0.0, -1.0; 1.0, 1.0, 1.0],
            dvector![1.0, 1.0, 0.5, 0.5, 0.8, 0.2, 1.2],
        )
        .unwrap();
        let fast = backward_reach(&sys, &input, &s).unwrap();
        let shift = input.linear_map(&(-sys.b())).unwrap();
        let hull = VPolytope::new(3, s.vertices().unwrap().pairwise_sums(&shift).unwrap()).unwrap();
        let slow = hull.facets().unwrap().affine_preimage(sys.a()).unwrap();
        assert!(fast.set_eq_tol(&slow, 1e-9).unwrap());
    }

    /// Is there `u ∈ [−1, 1]` with `A x + B u ∈ S`? Solved as an LP in `u`.
    fn exists_input(sys: &LinearSystem, s: &HPolytope, x: &DVector<f64>) -> bool {
        let rhs = s.b() - s.a() * sys.a() * x;
        let col = s.a() * sys.b();
        let m = col.nrows();
        let mut a = DMatrix::zeros(m + 2, 1);
        let mut b = DVector::zeros(m + 2);
        a.view_mut((0, 0), (m, 1)).copy_from(&col);
        b.rows_mut(0, m).copy_from(&rhs);
        a[(m, 0)] = 1.0;
        b[m] = 1.0;
        a[(m + 1, 0)] = -1.0;
        b[m + 1] = 1.0;
        b.add_scalar_mut(1e-9);
        matches!(lp_solve(&LpProblem::new(dvector![0.0], a, b)), LpResult::Optimal { .. })
    }

    #[test]
    fn double_integrator_reach_matches_feasibility_lp() {
        use rand::{Rng, SeedableRng};
        let p = double_integrator(&DoubleIntegratorParams::default()).unwrap();
        let s = HPolytope::from_box(&[-0.1, -0.1], &[0.1, 0.1]).unwrap();
        let r = backward_reach(&p.system, &p.input, &s).unwrap();
        let (lo, hi) = r.bounding_box().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut inside = 0;
        for _ in 0..1000 {
            let x = DVector::from_fn(2, |i, _| rng.random_range(lo[i] - 0.05..hi[i] + 0.05));
            let member = r.contains(&x);
            // Points within 1e-7 of the boundary may go either way.
            if r.depth(&x).abs() > 1e-7 {
                assert_eq!(member, exists_input(&p.system, &s, &x), "at {x}");
            }
            inside += member as usize;
        }
        assert!(inside > 100);
    }

    #[test]
    fn zero_horizon_is_target() {
        let p = double_integrator(&Default::default()).unwrap();
        let r = robust_reach_avoid(&p, &DisturbanceSet::origin(2), 0).unwrap();
        assert_eq!(r.sets.len(), 1);
        assert!(r.sets[0].set_eq_tol(&p.target, 1e-12).unwrap());
    }

    #[test]
    fn oversized_disturbance_empties_first_step() {
        let p = double_integrator(&Default::default()).unwrap();
        let e = DisturbanceSet::Ellipsoid(Ellipsoid::ball(dvector![0.0, 0.0], 1.5).unwrap());
        let r = robust_reach_avoid(&p, &e, 3).unwrap();
        assert_eq!(r.empty_from, Some(1));
        assert!(r.sets[1..].iter().all(HPolytope::is_empty));
        assert_eq!(r.sets.len(), 4);
    }

    #[test]
    fn viability_with_identity_dynamics_is_fixed() {
        let p = identity_problem(VPolytope::from_box(&[-0.1, -0.1], &[0.1, 0.1]).unwrap());
        let r = viability(&p, 4).unwrap();
        for s in &r.sets {
            assert!(s.set_eq_tol(&p.safe, 1e-12).unwrap());
        }
    }

    #[test]
    fn viable_sets_are_nested() {
        let p = double_integrator(&Default::default()).unwrap();
        let r = viability(&p, 5).unwrap();
        for k in 1..r.sets.len() {
            assert!(r.sets[k].subset_of(&r.sets[k - 1]).unwrap());
        }
        assert!(r.empty_from.is_none());
    }

    #[test]
    fn deterministic_reach_avoid_equals_viability() {
        let p = double_integrator(&Default::default()).unwrap();
        let ra = robust_reach_avoid(&p, &DisturbanceSet::origin(2), 5).unwrap();
        let vi = viability(&p, 5).unwrap();
        for (a, b) in ra.sets.iter().zip(&vi.sets) {
            assert!(a.set_eq_tol(b, 1e-9).unwrap());
        }
    }

    #[test]
    fn beta_zero_recovers_deterministic_recursion() {
        let p = double_integrator(&DoubleIntegratorParams { beta: 0.0, ..Default::default() }).unwrap();
        let r = underapproximate_level_set(&p).unwrap();
        let vi = viability(&p, 5).unwrap();
        assert!(r.last().set_eq_tol(vi.last(), 1e-9).unwrap());
    }

    #[test]
    fn beta_one_rejected() {
        let p = double_integrator(&DoubleIntegratorParams { beta: 1.0, ..Default::default() }).unwrap();
        assert!(matches!(underapproximate_level_set(&p), Err(ReachError::Prob(ProbError::UnreachableConfidence(_)))));
        assert!(double_integrator(&DoubleIntegratorParams { beta: 1.2, ..Default::default() }).is_err());
    }

    #[test]
    fn sets_stay_inside_safe_set() {
        let p = double_integrator(&Default::default()).unwrap();
        let r = underapproximate_level_set(&p).unwrap();
        for s in &r.sets[1..] {
            assert!(s.subset_of(&p.safe).unwrap());
            assert!(!s.is_empty());
            s.vertices().unwrap();
        }
    }

    #[test]
    fn singular_dynamics_rejected() {
        let err = LinearSystem::new(
            dmatrix![1.0, 0.0; 0.0, 0.0],
            DMatrix::zeros(2, 1),
            GaussianDisturbance::isotropic(2, 1.0).unwrap(),
        );
        assert_eq!(err.unwrap_err(), ReachError::Geom(GeomError::SingularMatrix));
    }
}
