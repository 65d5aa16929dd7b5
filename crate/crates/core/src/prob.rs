//! Gaussian disturbances and the chi-squared machinery that sizes the
//! bounded disturbance set: for `w ~ N(μ, Σ)`, the ellipsoid
//! `{ s : (s − μ)ᵀ Σ⁻¹ (s − μ) ≤ R² }` has probability mass `F_{χ²(n)}(R²)`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::geom::Ellipsoid;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbError {
    #[error("covariance matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("chi-squared argument must be non-negative, got {0}")]
    NegativeArgument(f64),
    #[error("degrees of freedom must be at least 1")]
    ZeroDegrees,
    #[error("unreachable confidence level {0}: the disturbance set would be unbounded")]
    UnreachableConfidence(f64),
    #[error("probability {0} outside [0, 1)")]
    InvalidProbability(f64),
}

/// `N(mean, covariance)` over `ℝⁿ`.
#[derive(Debug, Clone)]
pub struct GaussianDisturbance {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl PartialEq for GaussianDisturbance {
    fn eq(&self, other: &Self) -> bool {
        self.mean == other.mean && self.covariance == other.covariance
    }
}

impl GaussianDisturbance {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self, ProbError> {
        let n = mean.len();
        if covariance.nrows() != n || covariance.ncols() != n {
            return Err(ProbError::DimensionMismatch { expected: n, found: covariance.nrows() });
        }
        if (&covariance - covariance.transpose()).amax() > 1e-10 * covariance.amax().max(1.0) {
            return Err(ProbError::NotPositiveDefinite);
        }
        let chol = covariance.clone().cholesky().ok_or(ProbError::NotPositiveDefinite)?;
        Ok(Self { mean, covariance, chol })
    }

    /// Zero-mean isotropic disturbance `N(0, variance · I)`.
    pub fn isotropic(dim: usize, variance: f64) -> Result<Self, ProbError> {
        Self::new(DVector::zeros(dim), DMatrix::identity(dim, dim) * variance)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Lower Cholesky factor `L` with `L Lᵀ = Σ`.
    pub fn cholesky_l(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// Multivariate normal density at `s`.
    pub fn pdf(&self, s: &DVector<f64>) -> f64 {
        let n = self.dim() as f64;
        let z = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&(s - &self.mean))
            .expect("Cholesky factor is invertible");
        let log_det: f64 = 2.0 * self.chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        (-0.5 * n * (2.0 * std::f64::consts::PI).ln() - 0.5 * log_det - 0.5 * z.norm_squared()).exp()
    }

    /// One draw `μ + L η` with `η` standard normal.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let eta = DVector::from_fn(self.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        &self.mean + self.chol.l_dirty().lower_triangle() * eta
    }

    /// The ellipsoid centered at the mean, shaped by the covariance, whose
    /// Gaussian mass is exactly `p`.
    pub fn level_set(&self, p: f64) -> Result<Ellipsoid, ProbError> {
        let r2 = chi2_inv(self.dim(), p)?;
        let e = Ellipsoid::new(self.mean.clone(), self.covariance.clone(), r2)
            .map_err(|_| ProbError::NotPositiveDefinite)?;
        if !e.contains(&DVector::zeros(self.dim())) {
            log::warn!("disturbance set of mass {p} does not contain the origin");
        }
        Ok(e)
    }
}

/// Free-function form of [`GaussianDisturbance::pdf`].
pub fn gaussian_pdf(d: &GaussianDisturbance, s: &DVector<f64>) -> f64 {
    d.pdf(s)
}

/// Free-function form of [`GaussianDisturbance::level_set`].
pub fn disturbance_level_set(d: &GaussianDisturbance, p: f64) -> Result<Ellipsoid, ProbError> {
    d.level_set(p)
}

/// Regularized lower incomplete gamma `P(a, x)`: power series below
/// `x = a + 1`, Lentz continued fraction for the complement above.
pub fn regularized_gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let log_prefix = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        (sum * log_prefix.exp()).min(1.0)
    } else {
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-17 {
                break;
            }
        }
        (1.0 - log_prefix.exp() * h).max(0.0)
    }
}

/// `P{χ²(n) ≤ x}`.
pub fn chi2_cdf(n: usize, x: f64) -> Result<f64, ProbError> {
    if n == 0 {
        return Err(ProbError::ZeroDegrees);
    }
    if x < 0.0 || x.is_nan() {
        return Err(ProbError::NegativeArgument(x));
    }
    Ok(regularized_gamma_p(n as f64 / 2.0, x / 2.0))
}

fn chi2_pdf(n: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return if n == 2 { 0.5 } else { 0.0 };
    }
    let k = n as f64 / 2.0;
    ((k - 1.0) * x.ln() - x / 2.0 - k * 2f64.ln() - ln_gamma(k)).exp()
}

/// Quantile of `χ²(n)`: the `x` with `chi2_cdf(n, x) = p`.
///
/// Brackets the root by doubling, then runs safeguarded Newton steps.
pub fn chi2_inv(n: usize, p: f64) -> Result<f64, ProbError> {
    if n == 0 {
        return Err(ProbError::ZeroDegrees);
    }
    if p >= 1.0 {
        return Err(ProbError::UnreachableConfidence(p));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(ProbError::InvalidProbability(p));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let cdf = |x: f64| regularized_gamma_p(n as f64 / 2.0, x / 2.0);
    let mut lo = 0.0;
    let mut hi = (n as f64).max(1.0);
    while cdf(hi) < p {
        lo = hi;
        hi *= 2.0;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = cdf(x) - p;
        if f.abs() <= 1e-13 {
            break;
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = chi2_pdf(n, x);
        let newton = x - f / slope;
        x = if slope > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(x)
}
