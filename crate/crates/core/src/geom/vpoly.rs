use nalgebra::{DMatrix, DVector};

use super::lp::in_convex_hull;
use super::{check_direction, sort_dedup, GeomError, HPolytope, Support, MAX_ENUM_DIM};

/// Convex hull of a finite point set. An empty point list is the empty set.
#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope {
    dim: usize,
    points: Vec<DVector<f64>>,
}

impl VPolytope {
    /// Stores the points sorted lexicographically with near-duplicates merged.
    pub fn new(dim: usize, points: Vec<DVector<f64>>) -> Result<Self, GeomError> {
        for p in &points {
            if p.len() != dim {
                return Err(GeomError::DimensionMismatch { expected: dim, found: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(GeomError::NonFinite);
            }
        }
        Ok(Self { dim, points: sort_dedup(points) })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, GeomError> {
        let dim = rows.first().map_or(0, Vec::len);
        Self::new(dim, rows.iter().map(|r| DVector::from_vec(r.clone())).collect())
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, points: Vec::new() }
    }

    /// Interval `[lo, hi]` in one dimension, or a box in general.
    pub fn from_box(lo: &[f64], hi: &[f64]) -> Result<Self, GeomError> {
        if lo.len() != hi.len() {
            return Err(GeomError::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        let d = lo.len();
        let pts = (0..1usize << d)
            .map(|mask| DVector::from_fn(d, |j, _| if mask & (1 << j) == 0 { lo[j] } else { hi[j] }))
            .collect();
        Self::new(d, pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Drops every point that lies in the hull of the others.
    pub fn reduce(&self) -> VPolytope {
        let mut keep: Vec<DVector<f64>> = self.points.clone();
        let mut i = 0;
        while i < keep.len() {
            let others: Vec<DVector<f64>> =
                keep.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, p)| p.clone()).collect();
            if in_convex_hull(&others, &keep[i]) {
                keep.remove(i);
            } else {
                i += 1;
            }
        }
        Self { dim: self.dim, points: keep }
    }

    /// Image under `x ↦ M x`; `M` may change the dimension.
    pub fn linear_map(&self, m: &DMatrix<f64>) -> Result<VPolytope, GeomError> {
        if m.ncols() != self.dim {
            return Err(GeomError::DimensionMismatch { expected: self.dim, found: m.ncols() });
        }
        Self::new(m.nrows(), self.points.iter().map(|p| m * p).collect())
    }

    /// Point set `{ v + w }` over all pairs, without hull reduction.
    pub(crate) fn pairwise_sums(&self, other: &VPolytope) -> Result<Vec<DVector<f64>>, GeomError> {
        if other.dim != self.dim {
            return Err(GeomError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(self.points.iter().flat_map(|v| other.points.iter().map(move |w| v + w)).collect())
    }

    /// `self ⊕ other`, reduced to its extreme points.
    pub fn minkowski_sum(&self, other: &VPolytope) -> Result<VPolytope, GeomError> {
        let pts = self.pairwise_sums(other)?;
        Ok(Self::new(self.dim, pts)?.reduce())
    }

    /// `Some((lo, hi))` when the points are exactly the corners of an
    /// axis-aligned box.
    pub fn as_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let d = self.dim;
        if self.points.len() != 1usize.checked_shl(d as u32)? || d == 0 {
            return None;
        }
        let lo: Vec<f64> = (0..d).map(|i| self.points.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min)).collect();
        let hi: Vec<f64> = (0..d).map(|i| self.points.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
        let corner = |p: &DVector<f64>| (0..d).all(|i| p[i] == lo[i] || p[i] == hi[i]);
        if !self.points.iter().all(corner) || (0..d).any(|i| lo[i] >= hi[i]) {
            return None;
        }
        let mut codes: Vec<usize> =
            self.points.iter().map(|p| (0..d).filter(|&i| p[i] == hi[i]).map(|i| 1 << i).sum()).collect();
        codes.sort_unstable();
        codes.dedup();
        (codes.len() == self.points.len()).then_some((lo, hi))
    }

    pub fn centroid(&self) -> Option<DVector<f64>> {
        if self.points.is_empty() {
            return None;
        }
        let sum = self.points.iter().fold(DVector::zeros(self.dim), |acc, p| acc + p);
        Some(sum / self.points.len() as f64)
    }

    /// Minimal halfspace representation (V→H conversion), computed through
    /// the polar dual about the vertex centroid.
    pub fn facets(&self) -> Result<HPolytope, GeomError> {
        let d = self.dim;
        if d > MAX_ENUM_DIM {
            return Err(GeomError::DimensionTooLarge(d));
        }
        let Some(c) = self.centroid() else {
            return Ok(HPolytope::empty(d));
        };
        if self.points.len() <= d {
            return Err(GeomError::NotFullDimensional);
        }
        let centered = DMatrix::from_fn(self.points.len(), d, |r, col| self.points[r][col] - c[col]);
        let scale = centered.amax().max(f64::MIN_POSITIVE);
        let sv = centered.clone().singular_values();
        if sv.min() <= 1e-9 * scale {
            return Err(GeomError::NotFullDimensional);
        }
        // Polar dual { y : (v − c)ᵀ y ≤ 1 } is bounded because c is interior.
        let dual = HPolytope::new(centered, DVector::from_element(self.points.len(), 1.0))?;
        let dual_vertices = dual.vertices()?;
        let m = dual_vertices.len();
        let a = DMatrix::from_fn(m, d, |r, col| dual_vertices.points[r][col]);
        let b = DVector::from_fn(m, |r, _| 1.0 + dual_vertices.points[r].dot(&c));
        HPolytope::new(a, b)
    }

    /// Membership in the hull, via a barycentric feasibility LP.
    pub fn contains(&self, x: &DVector<f64>) -> bool {
        in_convex_hull(&self.points, x)
    }
}

impl Support for VPolytope {
    fn dim(&self) -> usize {
        self.dim
    }

    fn support(&self, direction: &DVector<f64>) -> Result<f64, GeomError> {
        check_direction(self.dim, direction)?;
        Ok(self.points.iter().map(|p| p.dot(direction)).fold(f64::NEG_INFINITY, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn square(r: f64) -> VPolytope {
        VPolytope::from_box(&[-r, -r], &[r, r]).unwrap()
    }

    #[test]
    fn support_is_max_over_points() {
        let v = VPolytope::from_rows(&[vec![0.0, 0.0], vec![2.0, 1.0]]).unwrap();
        assert_eq!(v.support(&dvector![1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(VPolytope::empty(2).support(&dvector![1.0, 0.0]).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn box_sum() {
        let s = square(1.0).minkowski_sum(&square(0.5)).unwrap();
        assert_eq!(s, square(1.5));
        assert_eq!(s.len(), 4);
        let origin = VPolytope::new(2, vec![dvector![0.0, 0.0]]).unwrap();
        assert_eq!(square(1.0).minkowski_sum(&origin).unwrap(), square(1.0));
    }

    #[test]
    fn segment_sum_is_square() {
        let a = VPolytope::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let b = VPolytope::from_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = a.minkowski_sum(&b).unwrap();
        assert_eq!(s, VPolytope::from_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap());
        assert_eq!(
            a.minkowski_sum(&VPolytope::from_rows(&[vec![0.0, 0.0, 0.0]]).unwrap()),
            Err(GeomError::DimensionMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn facets_of_square() {
        let h = square(1.0).facets().unwrap();
        assert_eq!(h.num_facets(), 4);
        assert!(h.set_eq_tol(&HPolytope::from_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap(), 1e-12).unwrap());
    }

    #[test]
    fn facets_round_trip() {
        let s = HPolytope::from_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let back = s.vertices().unwrap().facets().unwrap();
        assert!(back.set_eq_tol(&s, 1e-12).unwrap());
    }

    #[test]
    fn flat_inputs_rejected() {
        let seg = VPolytope::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(seg.facets(), Err(GeomError::NotFullDimensional));
    }

    #[test]
    fn reduce_removes_interior_points() {
        let mut pts = square(1.0).points().to_vec();
        pts.push(dvector![0.0, 0.0]);
        pts.push(dvector![1.0, 0.0]);
        let v = VPolytope::new(2, pts).unwrap().reduce();
        assert_eq!(v, square(1.0));
    }
}
