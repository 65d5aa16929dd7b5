//! Built-in benchmark models: the sampled double integrator and planar
//! Clohessy–Wiltshire–Hill rendezvous dynamics.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::geom::{HPolytope, VPolytope};
use crate::lagrangian::{LinearSystem, ReachError, ReachProblem};
use crate::prob::GaussianDisturbance;

/// Standard gravitational parameter of Earth, km³/s².
pub const MU_EARTH: f64 = 398_600.441_8;
/// Default chief orbit radius, km (about 500 km altitude).
pub const DEFAULT_ORBIT_RADIUS: f64 = 6_871.0;

/// Zero-order-hold discretization `(e^{A T}, ∫₀ᵀ e^{A s} ds B)`, read off the
/// exponential of the block matrix `[[A, B], [0, 0]] T`.
pub fn zero_order_hold(ac: &DMatrix<f64>, bc: &DMatrix<f64>, t: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = ac.nrows();
    let m = bc.ncols();
    let mut aug = DMatrix::zeros(n + m, n + m);
    aug.view_mut((0, 0), (n, n)).copy_from(&(ac * t));
    aug.view_mut((0, n), (n, m)).copy_from(&(bc * t));
    let e = aug.exp();
    (e.view((0, 0), (n, n)).into_owned(), e.view((0, n), (n, m)).into_owned())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoubleIntegratorParams {
    pub sampling_time: f64,
    /// Disturbance covariance is `variance · I₂`.
    pub variance: f64,
    /// Safe and target set `[−b, b]²`.
    pub state_bound: f64,
    /// Input set `[−b, b]`.
    pub input_bound: f64,
    pub beta: f64,
    pub horizon: usize,
}

impl Default for DoubleIntegratorParams {
    fn default() -> Self {
        Self { sampling_time: 0.25, variance: 0.005, state_bound: 1.0, input_bound: 1.0, beta: 0.8, horizon: 5 }
    }
}

/// `x⁺ = [[1, T], [0, 1]] x + [T²/2, T]ᵀ u + w`.
pub fn double_integrator(p: &DoubleIntegratorParams) -> Result<ReachProblem, ReachError> {
    let t = p.sampling_time;
    if !(t > 0.0) {
        return Err(ReachError::Invalid(format!("sampling time must be positive, got {t}")));
    }
    let a = DMatrix::from_row_slice(2, 2, &[1.0, t, 0.0, 1.0]);
    let b = DMatrix::from_row_slice(2, 1, &[t * t / 2.0, t]);
    let w = GaussianDisturbance::isotropic(2, p.variance)?;
    let sys = LinearSystem::new(a, b, w)?;
    let s = p.state_bound;
    let safe = HPolytope::from_box(&[-s, -s], &[s, s])?;
    let input = VPolytope::from_box(&[-p.input_bound], &[p.input_bound])?;
    ReachProblem::new(sys, safe.clone(), safe, input, p.beta, p.horizon)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CwhParams {
    /// Mean motion ω of the chief orbit, rad/s.
    pub orbital_rate: f64,
    /// Deputy mass m_d.
    pub deputy_mass: f64,
    /// Sampling time T_s, s.
    pub sampling_time: f64,
    /// Cap on the along-track coordinate that closes the line-of-sight cone.
    pub cone_cap: f64,
    pub beta: f64,
    pub horizon: usize,
}

impl Default for CwhParams {
    fn default() -> Self {
        Self {
            orbital_rate: (MU_EARTH / DEFAULT_ORBIT_RADIUS.powi(3)).sqrt(),
            deputy_mass: 300.0,
            sampling_time: 20.0,
            cone_cap: 10.0,
            beta: 0.8,
            horizon: 5,
        }
    }
}

/// Continuous-time planar CWH dynamics over `z = [x, y, ẋ, ẏ]`:
/// `ẍ = 3ω²x + 2ωẏ + F_x/m_d`, `ÿ = −2ωẋ + F_y/m_d`.
pub fn cwh_continuous(omega: f64, mass: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let w = omega;
    #[rustfmt::skip]
    let a = DMatrix::from_row_slice(4, 4, &[
        0.0,         0.0, 1.0,      0.0,
        0.0,         0.0, 0.0,      1.0,
        3.0 * w * w, 0.0, 0.0,      2.0 * w,
        0.0,         0.0, -2.0 * w, 0.0,
    ]);
    #[rustfmt::skip]
    let b = DMatrix::from_row_slice(4, 2, &[
        0.0,        0.0,
        0.0,        0.0,
        1.0 / mass, 0.0,
        0.0,        1.0 / mass,
    ]);
    (a, b)
}

/// Line-of-sight cone `|z₁| ≤ z₂ ≤ cap`, `|z₃|, |z₄| ≤ 0.05`.
pub fn cwh_safe_set(cap: f64) -> Result<HPolytope, ReachError> {
    #[rustfmt::skip]
    let a = DMatrix::from_row_slice(7, 4, &[
        1.0, -1.0, 0.0, 0.0,
        -1.0, -1.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, -1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, 0.0, -1.0,
    ]);
    let b = DVector::from_vec(vec![0.0, 0.0, cap, 0.05, 0.05, 0.05, 0.05]);
    Ok(HPolytope::new(a, b)?)
}

/// `|z₁| ≤ 0.1`, `−0.1 ≤ z₂ ≤ 0`, `|z₃|, |z₄| ≤ 0.01`.
pub fn cwh_target_set() -> Result<HPolytope, ReachError> {
    Ok(HPolytope::from_box(&[-0.1, -0.1, -0.01, -0.01], &[0.1, 0.0, 0.01, 0.01])?)
}

pub fn cwh_rendezvous(p: &CwhParams) -> Result<ReachProblem, ReachError> {
    if !(p.orbital_rate > 0.0 && p.deputy_mass > 0.0 && p.sampling_time > 0.0 && p.cone_cap > 0.0) {
        return Err(ReachError::Invalid(
            "orbital rate, deputy mass, sampling time and cone cap must be positive".into(),
        ));
    }
    let (ac, bc) = cwh_continuous(p.orbital_rate, p.deputy_mass);
    let (a, b) = zero_order_hold(&ac, &bc, p.sampling_time);
    let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![1e-4, 1e-4, 5e-8, 5e-8]));
    let w = GaussianDisturbance::new(DVector::zeros(4), cov)?;
    let sys = LinearSystem::new(a, b, w)?;
    let input = VPolytope::from_box(&[-0.1, -0.1], &[0.1, 0.1])?;
    ReachProblem::new(sys, cwh_safe_set(p.cone_cap)?, cwh_target_set()?, input, p.beta, p.horizon)
}

/// A named model with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelSpec {
    DoubleIntegrator(DoubleIntegratorParams),
    Cwh(CwhParams),
}

impl ModelSpec {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "double-integrator" | "di" => Some(Self::DoubleIntegrator(Default::default())),
            "cwh" | "cwh-rendezvous" => Some(Self::Cwh(Default::default())),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::DoubleIntegrator(_) => "double-integrator",
            Self::Cwh(_) => "cwh",
        }
    }

    pub fn build(&self) -> Result<ReachProblem, ReachError> {
        match self {
            Self::DoubleIntegrator(p) => double_integrator(p),
            Self::Cwh(p) => cwh_rendezvous(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_integrator_matrices() {
        let p = double_integrator(&Default::default()).unwrap();
        assert_eq!(p.system.b()[(0, 0)], 0.03125);
        assert_eq!(p.system.b()[(1, 0)], 0.25);
        let q = double_integrator(&DoubleIntegratorParams { sampling_time: 1.0, ..Default::default() }).unwrap();
        assert_eq!(q.system.a(), &DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]));
        assert!(double_integrator(&DoubleIntegratorParams { sampling_time: 0.0, ..Default::default() }).is_err());
    }

    #[test]
    fn zoh_of_pure_integrator() {
        let (a, b) = zero_order_hold(&DMatrix::zeros(2, 2), &DMatrix::identity(2, 2), 1.0);
        assert!((a - DMatrix::identity(2, 2)).amax() < 1e-15);
        assert!((b - DMatrix::identity(2, 2)).amax() < 1e-15);
    }

    #[test]
    fn zoh_reproduces_sampled_double_integrator() {
        // Closed form for the chain of integrators: A = [[1, T], [0, 1]], B = [T²/2, T]ᵀ.
        let ac = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let bc = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
        let (a, b) = zero_order_hold(&ac, &bc, 0.25);
        assert!((a - DMatrix::from_row_slice(2, 2, &[1.0, 0.25, 0.0, 1.0])).amax() < 1e-12);
        assert!((b - DMatrix::from_row_slice(2, 1, &[0.03125, 0.25])).amax() < 1e-12);
    }

    #[test]
    fn cwh_without_rotation_is_double_integrator_pair() {
        let (ac, bc) = cwh_continuous(0.0, 2.0);
        let (a, b) = zero_order_hold(&ac, &bc, 3.0);
        #[rustfmt::skip]
        let a_ref = DMatrix::from_row_slice(4, 4, &[
            1.0, 0.0, 3.0, 0.0,
            0.0, 1.0, 0.0, 3.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
        ]);
        let h = 9.0 / 2.0 / 2.0;
        let v = 3.0 / 2.0;
        let b_ref = DMatrix::from_row_slice(4, 2, &[h, 0.0, 0.0, h, v, 0.0, 0.0, v]);
        assert!((a - a_ref).amax() < 1e-12);
        assert!((b - b_ref).amax() < 1e-12);
    }

    #[test]
    fn cwh_problem_is_valid() {
        let p = cwh_rendezvous(&Default::default()).unwrap();
        assert_eq!(p.system.state_dim(), 4);
        assert_eq!(p.system.input_dim(), 2);
        assert!(p.system.a().clone().determinant().abs() > 0.5);
        let slice = p.safe.slice(&std::collections::BTreeMap::from([(2, 0.0), (3, 0.0)])).unwrap();
        let tri = HPolytope::new(
            DMatrix::from_row_slice(3, 2, &[1.0, -1.0, -1.0, -1.0, 0.0, 1.0]),
            DVector::from_vec(vec![0.0, 0.0, 10.0]),
        )
        .unwrap();
        assert!(slice.set_eq_tol(&tri, 1e-12).unwrap());
        assert!(cwh_rendezvous(&CwhParams { deputy_mass: 0.0, ..Default::default() }).is_err());
    }

    #[test]
    fn model_names() {
        assert_eq!(ModelSpec::from_name("cwh").unwrap().name(), "cwh");
        assert!(ModelSpec::from_name("pendulum").is_none());
        let spec: ModelSpec = serde_json::from_str(r#"{"model": "double-integrator", "variance": 1e-5}"#).unwrap();
        match spec {
            ModelSpec::DoubleIntegrator(p) => {
                assert_eq!(p.variance, 1e-5);
                assert_eq!(p.sampling_time, 0.25);
            }
            _ => panic!(),
        }
    }
}
