//! Minkowski sums of an H-polytope with zonotopes, one segment at a time.
//!
//! For `P ⊕ [−g, g]` every facet of `P` survives, translated by `±g`, and a
//! new facet appears over each ridge whose two neighbouring facets face
//! opposite sides of `g` (the silhouette of `P` seen along `g`). Its normal
//! is the combination of the two facet normals orthogonal to `g`. Tracking
//! vertices alongside the halfspaces keeps every step exact without a
//! fresh hull computation.

use nalgebra::{DMatrix, DVector};

use super::{sort_dedup, GeomError, HPolytope};

const ACTIVE_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-8;

fn active(a: &DVector<f64>, b: f64, x: &DVector<f64>) -> bool {
    b - a.dot(x) <= ACTIVE_TOL * (1.0 + b.abs())
}

fn rank(rows: &[&DVector<f64>], dim: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), dim, |r, c| rows[r][c]);
    let sv = m.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

fn affine_rank(points: &[&DVector<f64>], dim: usize) -> usize {
    let Some((first, rest)) = points.split_first() else {
        return 0;
    };
    let diffs: Vec<DVector<f64>> = rest.iter().map(|p| *p - *first).collect();
    rank(&diffs.iter().collect::<Vec<_>>(), dim)
}

struct Incidence {
    words: usize,
    bits: Vec<u64>,
}

impl Incidence {
    fn new(rows: &[(DVector<f64>, f64)], verts: &[DVector<f64>]) -> Self {
        let words = verts.len().div_ceil(64);
        let mut bits = vec![0u64; rows.len() * words];
        for (r, (a, b)) in rows.iter().enumerate() {
            for (v, x) in verts.iter().enumerate() {
                if active(a, *b, x) {
                    bits[r * words + v / 64] |= 1 << (v % 64);
                }
            }
        }
        Self { words, bits }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    fn common(&self, i: usize, j: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, (x, y)) in self.row(i).iter().zip(self.row(j)).enumerate() {
            let mut m = x & y;
            while m != 0 {
                out.push(w * 64 + m.trailing_zeros() as usize);
                m &= m - 1;
            }
        }
        out
    }
}

/// Keeps the rows supported by a facet's worth of vertices.
fn facet_rows(rows: Vec<(DVector<f64>, f64)>, verts: &[DVector<f64>], dim: usize) -> Vec<(DVector<f64>, f64)> {
    rows.into_iter()
        .filter(|(a, b)| {
            let on: Vec<&DVector<f64>> = verts.iter().filter(|x| active(a, *b, x)).collect();
            on.len() >= dim && affine_rank(&on, dim) == dim - 1
        })
        .collect()
}

fn is_vertex(rows: &[(DVector<f64>, f64)], x: &DVector<f64>, dim: usize) -> bool {
    let normals: Vec<&DVector<f64>> = rows.iter().filter(|(a, b)| active(a, *b, x)).map(|(a, _)| a).collect();
    normals.len() >= dim && rank(&normals, dim) == dim
}

impl HPolytope {
    /// `{ x + t : x ∈ self }`.
    pub fn translate(&self, t: &DVector<f64>) -> Result<HPolytope, GeomError> {
        if t.len() != self.dim() {
            return Err(GeomError::DimensionMismatch { expected: self.dim(), found: t.len() });
        }
        if self.is_empty() {
            return Ok(HPolytope::empty(self.dim()));
        }
        HPolytope::new(self.a().clone(), self.b() + self.a() * t)
    }

    /// Replaces groups of facets whose unit normals differ by less than `tol`
    /// with one facet, tightened so the result is a subset of `self`.
    ///
    /// With `c`, `r` the center and half-diagonal of the bounding box, a kept
    /// row `a_j` absorbs `a_i` through
    /// `b_j ← min(b_j, b_i − (a_i − a_j)ᵀc − |a_i − a_j| r)`, which makes
    /// `a_j x ≤ b_j` imply `a_i x ≤ b_i` on the box.
    pub fn merge_near_parallel(&self, tol: f64) -> Result<HPolytope, GeomError> {
        if self.is_empty() {
            return Ok(HPolytope::empty(self.dim()));
        }
        let (lo, hi) = self.bounding_box().ok_or(GeomError::Unbounded)?;
        let c = (&lo + &hi) * 0.5;
        let r = (&hi - &lo).norm() * 0.5;
        let mut kept: Vec<(DVector<f64>, f64)> = Vec::new();
        let mut merged = 0usize;
        for (a, b) in self.rows() {
            match kept.iter_mut().find(|(k, _)| (k - &a).norm() < tol) {
                Some((k, kb)) => {
                    let delta = &a - &*k;
                    *kb = kb.min(b - delta.dot(&c) - delta.norm() * r);
                    merged += 1;
                }
                None => kept.push((a, b)),
            }
        }
        if merged > 0 {
            log::debug!("merged {merged} near-parallel facets");
        }
        let a = DMatrix::from_fn(kept.len(), self.dim(), |i, j| kept[i].0[j]);
        let b = DVector::from_fn(kept.len(), |i, _| kept[i].1);
        Ok(HPolytope::new(a, b)?.reduce())
    }

    /// `self ⊕ Σ_i [−g_i, g_i]`, the sum with the zonotope spanned by
    /// `generators`.
    pub fn minkowski_sum_segments(&self, generators: &[DVector<f64>]) -> Result<HPolytope, GeomError> {
        let d = self.dim();
        for g in generators {
            if g.len() != d {
                return Err(GeomError::DimensionMismatch { expected: d, found: g.len() });
            }
        }
        if self.is_empty() {
            return Ok(HPolytope::empty(d));
        }
        let mut verts = self.vertices()?.points().to_vec();
        let mut rows = facet_rows(self.rows().collect(), &verts, d);
        for g in generators.iter().filter(|g| g.norm() > 0.0) {
            let inc = Incidence::new(&rows, &verts);
            let s: Vec<f64> = rows.iter().map(|(a, _)| a.dot(g)).collect();
            let tol = 1e-12 * g.norm();
            let mut next: Vec<(DVector<f64>, f64)> =
                rows.iter().zip(&s).map(|((a, b), si)| (a.clone(), b + si.abs())).collect();
            for i in (0..rows.len()).filter(|&i| s[i] > tol) {
                for j in (0..rows.len()).filter(|&j| s[j] < -tol) {
                    let common = inc.common(i, j);
                    if common.len() + 1 < d {
                        continue;
                    }
                    let pts: Vec<&DVector<f64>> = common.iter().map(|&v| &verts[v]).collect();
                    if affine_rank(&pts, d) + 2 != d {
                        continue;
                    }
                    let n = &rows[i].0 * -s[j] + &rows[j].0 * s[i];
                    let r = -s[j] * rows[i].1 + s[i] * rows[j].1;
                    let norm = n.norm();
                    next.push((n / norm, r / norm));
                }
            }
            let candidates: Vec<DVector<f64>> = verts.iter().flat_map(|v| [v + g, v - g]).collect();
            verts = sort_dedup(candidates.into_iter().filter(|x| is_vertex(&next, x, d)).collect());
            rows = facet_rows(next, &verts, d);
        }
        let a = DMatrix::from_fn(rows.len(), d, |r, c| rows[r].0[c]);
        let b = DVector::from_fn(rows.len(), |r, _| rows[r].1);
        HPolytope::new(a, b)
    }
}
