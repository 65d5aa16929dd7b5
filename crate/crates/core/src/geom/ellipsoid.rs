use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{check_direction, GeomError, Support, VPolytope};

/// `{ s : (s − μ)ᵀ Σ⁻¹ (s − μ) ≤ R² }`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    center: DVector<f64>,
    shape: DMatrix<f64>,
    radius2: f64,
}

const SYMMETRY_TOL: f64 = 1e-10;

impl Ellipsoid {
    pub fn new(center: DVector<f64>, shape: DMatrix<f64>, radius2: f64) -> Result<Self, GeomError> {
        let n = center.len();
        if shape.nrows() != n || shape.ncols() != n {
            return Err(GeomError::DimensionMismatch { expected: n, found: shape.nrows() });
        }
        if center.iter().chain(shape.iter()).any(|v| !v.is_finite()) || !radius2.is_finite() {
            return Err(GeomError::NonFinite);
        }
        if radius2 < 0.0 {
            return Err(GeomError::InvalidEllipsoid(format!("negative radius² {radius2}")));
        }
        if (&shape - shape.transpose()).amax() > SYMMETRY_TOL {
            return Err(GeomError::InvalidEllipsoid("shape matrix not symmetric".into()));
        }
        let eig = SymmetricEigen::new(shape.clone());
        if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
            return Err(GeomError::InvalidEllipsoid("shape matrix not positive definite".into()));
        }
        Ok(Self { center, shape, radius2 })
    }

    /// Euclidean ball of the given radius.
    pub fn ball(center: DVector<f64>, radius: f64) -> Result<Self, GeomError> {
        let n = center.len();
        Self::new(center, DMatrix::identity(n, n), radius * radius)
    }

    /// The singleton `{ point }`.
    pub fn point(center: DVector<f64>) -> Self {
        let n = center.len();
        Self { center, shape: DMatrix::identity(n, n), radius2: 0.0 }
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn radius2(&self) -> f64 {
        self.radius2
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Squared Mahalanobis distance of `x` from the center.
    pub fn mahalanobis2(&self, x: &DVector<f64>) -> f64 {
        let d = x - &self.center;
        let chol = self.shape.clone().cholesky().expect("shape is SPD by construction");
        let z = chol.l().solve_lower_triangular(&d).expect("triangular solve");
        z.norm_squared()
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.mahalanobis2(x) <= self.radius2 * (1.0 + 1e-12) + 1e-15
    }

    /// `count` points on the boundary, spread evenly in angle through the
    /// Cholesky map; in 2-D they are the vertices of an inscribed polygon.
    /// Dimensions above two use the `2n` principal semi-axis endpoints.
    pub fn boundary_points(&self, count: usize) -> VPolytope {
        let n = self.dim();
        let r = self.radius2.sqrt();
        let l = self.shape.clone().cholesky().expect("shape is SPD by construction").l();
        let mut pts = Vec::new();
        if n == 2 {
            for k in 0..count.max(3) {
                let th = 2.0 * std::f64::consts::PI * k as f64 / count.max(3) as f64;
                let z = DVector::from_vec(vec![th.cos() * r, th.sin() * r]);
                pts.push(&self.center + &l * z);
            }
        } else {
            for i in 0..n {
                for s in [-1.0, 1.0] {
                    let mut z = DVector::zeros(n);
                    z[i] = s * r;
                    pts.push(&self.center + &l * z);
                }
            }
        }
        VPolytope::new(n, pts).expect("points have ellipsoid dimension")
    }
}

impl Support for Ellipsoid {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn support(&self, direction: &DVector<f64>) -> Result<f64, GeomError> {
        check_direction(self.dim(), direction)?;
        let spread = direction.dot(&(&self.shape * direction)).max(0.0).sqrt();
        Ok(direction.dot(&self.center) + self.radius2.sqrt() * spread)
    }
}
