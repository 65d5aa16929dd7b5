//! Exact convex-polytope engine: halfspace and vertex representations,
//! ellipsoids, and the set operations used by the backward recursion.

mod ellipsoid;
mod enumerate;
mod hpoly;
pub mod io;
pub mod lp;
mod segments;
mod vpoly;

pub use ellipsoid::Ellipsoid;
pub use enumerate::vertices_exhaustive;
pub use hpoly::{ChebyshevBall, HPolytope};
pub use lp::{lp_solve, LpProblem, LpResult};
pub use vpoly::VPolytope;

use nalgebra::DVector;
use thiserror::Error;

/// Slack allowed in membership and containment tests.
pub const CONTAINS_TOL: f64 = 1e-9;
/// Feasibility tolerance for candidate vertices.
pub const VERTEX_FEAS_TOL: f64 = 1e-8;
/// Points closer than this are merged.
pub const DEDUP_TOL: f64 = 1e-7;
/// Chebyshev radius below which a polytope counts as empty.
pub const EMPTY_RADIUS: f64 = 1e-10;
/// Largest dimension accepted by vertex/facet enumeration.
pub const MAX_ENUM_DIM: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate direction")]
    DegenerateDirection,
    #[error("system matrix singular")]
    SingularMatrix,
    #[error("vertex enumeration requires bounded polytope")]
    Unbounded,
    #[error("not full-dimensional")]
    NotFullDimensional,
    #[error("enumeration supports dimension <= {MAX_ENUM_DIM}, got {0}")]
    DimensionTooLarge(usize),
    #[error("invalid ellipsoid: {0}")]
    InvalidEllipsoid(String),
    #[error("non-finite value in input")]
    NonFinite,
}

/// Anything with a support function `h_S(a) = sup { aᵀx : x ∈ S }`.
///
/// Returns `+∞` when the set is unbounded along `a` and `−∞` when it is empty.
pub trait Support {
    fn dim(&self) -> usize;
    fn support(&self, direction: &DVector<f64>) -> Result<f64, GeomError>;
}

pub(crate) fn check_direction(dim: usize, direction: &DVector<f64>) -> Result<(), GeomError> {
    if direction.len() != dim {
        return Err(GeomError::DimensionMismatch { expected: dim, found: direction.len() });
    }
    if direction.iter().any(|v| !v.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    if direction.norm() == 0.0 {
        return Err(GeomError::DegenerateDirection);
    }
    Ok(())
}

/// Lexicographic comparison of equal-length slices.
pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Sorts points lexicographically and merges those within [`DEDUP_TOL`].
pub(crate) fn sort_dedup(mut pts: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    pts.sort_by(|a, b| lex_cmp(a.as_slice(), b.as_slice()));
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(pts.len());
    for p in pts {
        if !out.iter().any(|q| (q - &p).amax() < DEDUP_TOL) {
            out.push(p);
        }
    }
    out
}
