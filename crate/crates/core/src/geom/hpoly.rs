use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::enumerate::vertices_double_description;
use super::lp::{lp_solve, LpProblem, LpResult};
use super::{
    check_direction, lex_cmp, GeomError, Support, VPolytope, CONTAINS_TOL, EMPTY_RADIUS, MAX_ENUM_DIM,
};

/// Convex polytope `{ x : A x ≤ b }` with unit-length rows.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    dim: usize,
    a: DMatrix<f64>,
    b: DVector<f64>,
    /// Set when construction met an infeasible zero-normal row, or for the
    /// canonical empty polytope.
    empty: bool,
}

/// Largest inscribed ball. `radius` is negative for empty polytopes and
/// `+∞` when arbitrarily large balls fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevBall {
    pub center: DVector<f64>,
    pub radius: f64,
}

const ZERO_NORMAL: f64 = 1e-12;

impl HPolytope {
    /// Builds `{ x : a x ≤ b }`. Rows are scaled to unit normals, zero rows are
    /// dropped (or mark the set empty when `b < 0`), and rows are sorted.
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self, GeomError> {
        if a.nrows() != b.len() {
            return Err(GeomError::DimensionMismatch { expected: a.nrows(), found: b.len() });
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        let dim = a.ncols();
        let mut empty = false;
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(a.nrows());
        for i in 0..a.nrows() {
            let norm = a.row(i).norm();
            if norm <= ZERO_NORMAL {
                if b[i] < -CONTAINS_TOL {
                    empty = true;
                }
                continue;
            }
            rows.push((a.row(i).iter().map(|v| v / norm).collect(), b[i] / norm));
        }
        if empty {
            return Ok(Self::empty(dim));
        }
        rows.sort_by(|x, y| lex_cmp(&x.0, &y.0).then(x.1.total_cmp(&y.1)));
        // Parallel duplicates: keep the tightest offset.
        rows.dedup_by(|next, kept| {
            let same = next.0.iter().zip(&kept.0).all(|(p, q)| (p - q).abs() < 1e-12);
            if same {
                kept.1 = kept.1.min(next.1);
            }
            same
        });
        Ok(Self::from_rows(dim, rows))
    }

    fn from_rows(dim: usize, rows: Vec<(Vec<f64>, f64)>) -> Self {
        let m = rows.len();
        let a = DMatrix::from_fn(m, dim, |r, c| rows[r].0[c]);
        let b = DVector::from_fn(m, |r, _| rows[r].1);
        Self { dim, a, b, empty: false }
    }

    /// The canonical empty set of the given dimension.
    pub fn empty(dim: usize) -> Self {
        Self { dim, a: DMatrix::zeros(0, dim), b: DVector::zeros(0), empty: true }
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn from_box(lo: &[f64], hi: &[f64]) -> Result<Self, GeomError> {
        if lo.len() != hi.len() {
            return Err(GeomError::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        let d = lo.len();
        let mut a = DMatrix::zeros(2 * d, d);
        let mut b = DVector::zeros(2 * d);
        for j in 0..d {
            a[(2 * j, j)] = 1.0;
            b[2 * j] = hi[j];
            a[(2 * j + 1, j)] = -1.0;
            b[2 * j + 1] = -lo[j];
        }
        Self::new(a, b)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn num_facets(&self) -> usize {
        self.a.nrows()
    }

    /// Halfspace rows `(normal, offset)`.
    pub fn rows(&self) -> impl Iterator<Item = (DVector<f64>, f64)> + '_ {
        (0..self.a.nrows()).map(move |i| (self.a.row(i).transpose(), self.b[i]))
    }

    fn check_dim(&self, found: usize) -> Result<(), GeomError> {
        if found != self.dim {
            return Err(GeomError::DimensionMismatch { expected: self.dim, found });
        }
        Ok(())
    }

    /// Signed slack `b − A x` of every row.
    pub fn slacks(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.b - &self.a * x
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.contains_tol(x, CONTAINS_TOL)
    }

    pub fn contains_tol(&self, x: &DVector<f64>, tol: f64) -> bool {
        assert_eq!(x.len(), self.dim, "point dimension mismatch");
        !self.empty && self.slacks(x).iter().all(|&s| s >= -tol)
    }

    /// Euclidean distance from an interior point to the boundary (negative
    /// outside). Rows are unit normals, so this is the smallest slack.
    pub fn depth(&self, x: &DVector<f64>) -> f64 {
        if self.empty {
            return f64::NEG_INFINITY;
        }
        self.slacks(x).iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn chebyshev_center(&self) -> ChebyshevBall {
        let d = self.dim;
        if self.empty {
            return ChebyshevBall { center: DVector::zeros(d), radius: f64::NEG_INFINITY };
        }
        let m = self.a.nrows();
        if m == 0 {
            return ChebyshevBall { center: DVector::zeros(d), radius: f64::INFINITY };
        }
        let mut a = DMatrix::zeros(m, d + 1);
        a.view_mut((0, 0), (m, d)).copy_from(&self.a);
        a.column_mut(d).fill(1.0);
        let mut c = DVector::zeros(d + 1);
        c[d] = 1.0;
        match lp_solve(&LpProblem::new(c, a, self.b.clone())) {
            LpResult::Optimal { x, .. } => ChebyshevBall { center: x.rows(0, d).into_owned(), radius: x[d] },
            LpResult::Unbounded => ChebyshevBall { center: DVector::zeros(d), radius: f64::INFINITY },
            LpResult::Infeasible => ChebyshevBall { center: DVector::zeros(d), radius: f64::NEG_INFINITY },
        }
    }

    /// Empty or flat: the inscribed radius is below [`EMPTY_RADIUS`].
    pub fn is_empty(&self) -> bool {
        self.empty || self.chebyshev_center().radius < EMPTY_RADIUS
    }

    /// Removes redundant halfspaces. Empty (or flat) polytopes collapse to the
    /// canonical empty set.
    pub fn reduce(&self) -> HPolytope {
        if self.is_empty() {
            return Self::empty(self.dim);
        }
        let m = self.a.nrows();
        let mut keep = vec![true; m];
        for i in 0..m {
            let others: Vec<usize> = (0..m).filter(|&k| k != i && keep[k]).collect();
            let mut a = DMatrix::zeros(others.len() + 1, self.dim);
            let mut b = DVector::zeros(others.len() + 1);
            for (r, &k) in others.iter().enumerate() {
                a.row_mut(r).copy_from(&self.a.row(k));
                b[r] = self.b[k];
            }
            a.row_mut(others.len()).copy_from(&self.a.row(i));
            b[others.len()] = self.b[i] + 1.0;
            let c = self.a.row(i).transpose();
            if let LpResult::Optimal { value, .. } = lp_solve(&LpProblem::new(c, a, b)) {
                if value <= self.b[i] + CONTAINS_TOL {
                    keep[i] = false;
                }
            }
        }
        let rows = (0..m)
            .filter(|&i| keep[i])
            .map(|i| (self.a.row(i).iter().copied().collect(), self.b[i]))
            .collect();
        Self::from_rows(self.dim, rows)
    }

    pub fn intersect(&self, other: &HPolytope) -> Result<HPolytope, GeomError> {
        self.check_dim(other.dim)?;
        if self.empty || other.empty {
            return Ok(Self::empty(self.dim));
        }
        let a = stack(&self.a, &other.a);
        let b = DVector::from_iterator(self.b.len() + other.b.len(), self.b.iter().chain(other.b.iter()).copied());
        Ok(Self::new(a, b)?.reduce())
    }

    /// Pontryagin difference `self ⊖ other = { x : x + e ∈ self ∀ e ∈ other }`,
    /// computed by shifting each facet inward by the support of `other`.
    pub fn minkowski_diff(&self, other: &impl Support) -> Result<HPolytope, GeomError> {
        self.check_dim(other.dim())?;
        if self.empty {
            return Ok(self.clone());
        }
        let mut b = self.b.clone();
        for i in 0..self.a.nrows() {
            let h = other.support(&self.a.row(i).transpose())?;
            if h == f64::INFINITY {
                return Ok(Self::empty(self.dim));
            }
            if h.is_finite() {
                b[i] -= h;
            }
        }
        Ok(Self::new(self.a.clone(), b)?.reduce())
    }

    /// `{ x : M x ∈ self }` for invertible `M`.
    pub fn affine_preimage(&self, m: &DMatrix<f64>) -> Result<HPolytope, GeomError> {
        if m.nrows() != m.ncols() {
            return Err(GeomError::SingularMatrix);
        }
        self.check_dim(m.nrows())?;
        let sv = m.clone().singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        if smin <= 0.0 || smax / smin > 1e12 {
            return Err(GeomError::SingularMatrix);
        }
        if self.empty {
            return Ok(self.clone());
        }
        Self::new(&self.a * m, self.b.clone())
    }

    /// Fixes the given coordinates and returns the polytope over the
    /// remaining ones (in their original order).
    pub fn slice(&self, fixed: &BTreeMap<usize, f64>) -> Result<HPolytope, GeomError> {
        if let Some((&idx, _)) = fixed.iter().next_back() {
            self.check_dim(self.dim.max(idx + 1))?;
        }
        let free: Vec<usize> = (0..self.dim).filter(|j| !fixed.contains_key(j)).collect();
        if self.empty {
            return Ok(Self::empty(free.len()));
        }
        let m = self.a.nrows();
        let a = DMatrix::from_fn(m, free.len(), |r, c| self.a[(r, free[c])]);
        let b = DVector::from_fn(m, |r, _| {
            self.b[r] - fixed.iter().map(|(&j, &v)| self.a[(r, j)] * v).sum::<f64>()
        });
        let sliced = Self::new(a, b)?;
        if free.is_empty() {
            return Ok(sliced);
        }
        Ok(sliced.reduce())
    }

    /// `self ⊆ other`, checked facet by facet with support LPs.
    pub fn subset_of(&self, other: &HPolytope) -> Result<bool, GeomError> {
        self.subset_of_tol(other, CONTAINS_TOL)
    }

    pub fn subset_of_tol(&self, other: &HPolytope, tol: f64) -> Result<bool, GeomError> {
        self.check_dim(other.dim)?;
        if self.is_empty() {
            return Ok(true);
        }
        if other.empty {
            return Ok(false);
        }
        for (a, b) in other.rows() {
            if self.support(&a)? > b + tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Mutual containment within `tol`.
    pub fn set_eq_tol(&self, other: &HPolytope, tol: f64) -> Result<bool, GeomError> {
        Ok(self.subset_of_tol(other, tol)? && other.subset_of_tol(self, tol)?)
    }

    /// Per-axis bounds, `None` if the set is empty or unbounded.
    pub fn bounding_box(&self) -> Option<(DVector<f64>, DVector<f64>)> {
        if self.empty {
            return None;
        }
        let d = self.dim;
        let mut lo = DVector::zeros(d);
        let mut hi = DVector::zeros(d);
        for j in 0..d {
            let mut e = DVector::zeros(d);
            e[j] = 1.0;
            hi[j] = self.support(&e).ok()?;
            e[j] = -1.0;
            lo[j] = -self.support(&e).ok()?;
            if !hi[j].is_finite() || !lo[j].is_finite() {
                return None;
            }
        }
        Some((lo, hi))
    }

    /// Extreme points (H→V conversion).
    pub fn vertices(&self) -> Result<VPolytope, GeomError> {
        let d = self.dim;
        if d > MAX_ENUM_DIM {
            return Err(GeomError::DimensionTooLarge(d));
        }
        let ball = self.chebyshev_center();
        if ball.radius < -EMPTY_RADIUS {
            return Ok(VPolytope::empty(d));
        }
        if ball.radius < EMPTY_RADIUS {
            return Err(GeomError::NotFullDimensional);
        }
        let (lo, hi) = self.bounding_box().ok_or(GeomError::Unbounded)?;
        let pts = vertices_double_description(&self.a, &self.b, &lo, &hi);
        VPolytope::new(d, pts)
    }
}

impl Support for HPolytope {
    fn dim(&self) -> usize {
        self.dim
    }

    fn support(&self, direction: &DVector<f64>) -> Result<f64, GeomError> {
        check_direction(self.dim, direction)?;
        if self.empty {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(match lp_solve(&LpProblem::new(direction.clone(), self.a.clone(), self.b.clone())) {
            LpResult::Optimal { value, .. } => value,
            LpResult::Unbounded => f64::INFINITY,
            LpResult::Infeasible => f64::NEG_INFINITY,
        })
    }
}

fn stack(top: &DMatrix<f64>, bottom: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(top.nrows() + bottom.nrows(), top.ncols());
    out.view_mut((0, 0), top.shape()).copy_from(top);
    out.view_mut((top.nrows(), 0), bottom.shape()).copy_from(bottom);
    out
}
