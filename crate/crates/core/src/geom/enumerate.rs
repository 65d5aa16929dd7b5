//! Vertex enumeration kernels for bounded, full-dimensional H-polytopes.
//!
//! Two independent routes are kept: [`vertices_exhaustive`] tries every
//! `dim`-subset of facets, and the double-description pass inserts one
//! halfspace at a time into an enclosing box. Production code uses the latter,
//! the exhaustive kernel stays as a reference for tests and small inputs.

use nalgebra::{DMatrix, DVector};

use super::{sort_dedup, VERTEX_FEAS_TOL};

/// Enumerates all `dim`-subsets of the rows of `a`, solves each square
/// system and keeps solutions feasible within [`VERTEX_FEAS_TOL`].
pub fn vertices_exhaustive(a: &DMatrix<f64>, b: &DVector<f64>) -> Vec<DVector<f64>> {
    let m = a.nrows();
    let d = a.ncols();
    let mut out = Vec::new();
    if d == 0 || m < d {
        return out;
    }
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let sub = DMatrix::from_fn(d, d, |r, c| a[(idx[r], c)]);
        let rhs = DVector::from_fn(d, |r, _| b[idx[r]]);
        let lu = sub.full_piv_lu();
        if let Some(x) = lu.solve(&rhs) {
            // Reject near-singular subsets whose solution is not a point.
            let det = lu.determinant().abs();
            if det > 1e-12 && (a * &x - b).iter().all(|&s| s <= VERTEX_FEAS_TOL) {
                out.push(x);
            }
        }
        // Next combination in lexicographic order.
        let mut k = d;
        loop {
            if k == 0 {
                return sort_dedup(out);
            }
            k -= 1;
            if idx[k] < m - d + k {
                break;
            }
        }
        idx[k] += 1;
        for j in (k + 1)..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

struct Vertex {
    point: Vec<f64>,
    /// Sorted indices of the constraints tight at this vertex. Indices at or
    /// above `m` refer to the enclosing box.
    active: Vec<u32>,
}

/// Double-description vertex enumeration. `lo`/`hi` must bound the polytope;
/// the enclosing box is padded so none of its faces survives.
/// Merges vertices that coincide up to rounding, keeping the union of their
/// active sets. Without this a degenerate vertex is cloned every time a
/// nearly incident hyperplane is inserted, and the clones pair up
/// quadratically at later insertions.
fn merge_coincident(verts: &mut Vec<Vertex>) {
    const TOL: f64 = 1e-10;
    let mut order: Vec<usize> = (0..verts.len()).collect();
    order.sort_by(|&x, &y| verts[x].point[0].total_cmp(&verts[y].point[0]));
    let mut absorbed = vec![false; verts.len()];
    for (k, &i) in order.iter().enumerate() {
        if absorbed[i] {
            continue;
        }
        for &j in &order[k + 1..] {
            if verts[j].point[0] - verts[i].point[0] > TOL {
                break;
            }
            if absorbed[j] {
                continue;
            }
            let close = verts[i].point.iter().zip(&verts[j].point).all(|(p, q)| (p - q).abs() <= TOL * (1.0 + p.abs()));
            if close {
                absorbed[j] = true;
                let extra = std::mem::take(&mut verts[j].active);
                for idx in extra {
                    insert_sorted(&mut verts[i].active, idx);
                }
            }
        }
    }
    if absorbed.iter().any(|&a| a) {
        let mut k = 0;
        verts.retain(|_| {
            k += 1;
            !absorbed[k - 1]
        });
    }
}

pub(crate) fn vertices_double_description(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    lo: &DVector<f64>,
    hi: &DVector<f64>,
) -> Vec<DVector<f64>> {
    let m = a.nrows();
    let d = a.ncols();
    let rows: Vec<Vec<f64>> = (0..m).map(|i| a.row(i).iter().copied().collect()).collect();
    let normal = |idx: u32| -> Vec<f64> {
        let idx = idx as usize;
        if idx < m {
            rows[idx].clone()
        } else {
            let j = (idx - m) / 2;
            let mut e = vec![0.0; d];
            e[j] = if (idx - m).is_multiple_of(2) { -1.0 } else { 1.0 };
            e
        }
    };

    let mut verts: Vec<Vertex> = Vec::with_capacity(1 << d);
    for mask in 0u32..(1 << d) {
        let mut point = vec![0.0; d];
        let mut active = Vec::with_capacity(d);
        for j in 0..d {
            let pad = 0.1 * (hi[j] - lo[j]) + 1e-3;
            if mask & (1 << j) == 0 {
                point[j] = lo[j] - pad;
                active.push((m + 2 * j) as u32);
            } else {
                point[j] = hi[j] + pad;
                active.push((m + 2 * j + 1) as u32);
            }
        }
        verts.push(Vertex { point, active });
    }

    let mut slack = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let tol = 1e-9 * (1.0 + b[i].abs());
        slack.clear();
        slack.extend(verts.iter().map(|v| b[i] - dot(row, &v.point)));
        if slack.iter().all(|&s| s >= -tol) {
            for (v, &s) in verts.iter_mut().zip(&slack) {
                if s <= tol {
                    insert_sorted(&mut v.active, i as u32);
                }
            }
            continue;
        }
        let plus: Vec<usize> = (0..verts.len()).filter(|&k| slack[k] > tol).collect();
        let minus: Vec<usize> = (0..verts.len()).filter(|&k| slack[k] < -tol).collect();
        let mut created = Vec::new();
        for &p in &plus {
            for &q in &minus {
                let common = intersect_sorted(&verts[p].active, &verts[q].active);
                if common.len() + 1 < d {
                    continue;
                }
                if d > 1 && rank(&common, &normal, d) + 1 != d {
                    continue;
                }
                let (sp, sq) = (slack[p], slack[q]);
                let t = sp / (sp - sq);
                let point: Vec<f64> = verts[p]
                    .point
                    .iter()
                    .zip(&verts[q].point)
                    .map(|(x, y)| x + t * (y - x))
                    .collect();
                let mut active = common;
                insert_sorted(&mut active, i as u32);
                created.push(Vertex { point, active });
            }
        }
        let mut next = Vec::with_capacity(verts.len() + created.len());
        for (k, mut v) in verts.drain(..).enumerate() {
            if slack[k] < -tol {
                continue;
            }
            if slack[k] <= tol {
                insert_sorted(&mut v.active, i as u32);
            }
            next.push(v);
        }
        next.extend(created);
        verts = next;
        merge_coincident(&mut verts);
        if verts.is_empty() {
            return Vec::new();
        }
    }
    sort_dedup(verts.into_iter().map(|v| DVector::from_vec(v.point)).collect())
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn insert_sorted(v: &mut Vec<u32>, x: u32) {
    if let Err(pos) = v.binary_search(&x) {
        v.insert(pos, x);
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Rank of the normals indexed by `idx`, by Gaussian elimination with
/// partial pivoting. Stops early once the rank reaches `d`.
fn rank(idx: &[u32], normal: &impl Fn(u32) -> Vec<f64>, d: usize) -> usize {
    let mut m: Vec<Vec<f64>> = idx.iter().map(|&i| normal(i)).collect();
    let mut r = 0;
    for c in 0..d {
        if r == m.len() {
            break;
        }
        let (piv, val) = (r..m.len())
            .map(|k| (k, m[k][c].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val < 1e-10 {
            continue;
        }
        m.swap(r, piv);
        for k in (r + 1)..m.len() {
            let f = m[k][c] / m[r][c];
            if f != 0.0 {
                for cc in c..d {
                    m[k][cc] -= f * m[r][cc];
                }
            }
        }
        r += 1;
    }
    r
}
