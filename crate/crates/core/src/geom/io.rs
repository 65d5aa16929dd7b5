//! Polytope file format: a JSON document with `dim`, and at least one of
//! `H` (rows `[a_1, …, a_dim, b]` meaning `a·x ≤ b`) or `V` (vertex arrays).

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Ellipsoid, GeomError, HPolytope, VPolytope};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dim: usize,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<Vec<f64>>>,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error in {path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

impl PolytopeFile {
    /// H-rep of the set; when vertices are present they are included as well.
    /// The canonical empty set is written with the single row `0·x ≤ −1`.
    pub fn from_hpolytope(p: &HPolytope, with_vertices: bool) -> Self {
        let dim = p.dim();
        if p.is_empty() {
            let mut row = vec![0.0; dim];
            row.push(-1.0);
            return Self { dim, h: Some(vec![row]), v: with_vertices.then(Vec::new) };
        }
        let h = p
            .rows()
            .map(|(a, b)| a.iter().copied().chain(std::iter::once(b)).collect())
            .collect();
        let v = if with_vertices {
            p.vertices().ok().map(|vp| vp.points().iter().map(|x| x.iter().copied().collect()).collect())
        } else {
            None
        };
        Self { dim, h: Some(h), v }
    }

    pub fn from_vpolytope(p: &VPolytope) -> Self {
        Self { dim: p.dim(), h: None, v: Some(p.points().iter().map(|x| x.iter().copied().collect()).collect()) }
    }

    fn validate(&self) -> Result<(), FormatError> {
        if self.dim == 0 {
            return Err(FormatError::Invalid("`dim` must be positive".into()));
        }
        if self.h.is_none() && self.v.is_none() {
            return Err(FormatError::Invalid("polytope needs `H` or `V`".into()));
        }
        for (i, row) in self.h.iter().flatten().enumerate() {
            if row.len() != self.dim + 1 {
                return Err(FormatError::Invalid(format!(
                    "H row {i} has {} entries, expected dim+1 = {}",
                    row.len(),
                    self.dim + 1
                )));
            }
        }
        for (i, row) in self.v.iter().flatten().enumerate() {
            if row.len() != self.dim {
                return Err(FormatError::Invalid(format!(
                    "V row {i} has {} entries, expected dim = {}",
                    row.len(),
                    self.dim
                )));
            }
        }
        Ok(())
    }

    /// Halfspace form; converts vertices when only `V` is present.
    pub fn to_hpolytope(&self) -> Result<HPolytope, FormatError> {
        self.validate()?;
        match &self.h {
            Some(rows) => {
                let m = rows.len();
                let a = DMatrix::from_fn(m, self.dim, |r, c| rows[r][c]);
                let b = DVector::from_fn(m, |r, _| rows[r][self.dim]);
                Ok(HPolytope::new(a, b)?)
            }
            None => Ok(self.to_vpolytope()?.facets()?),
        }
    }

    /// Vertex form; enumerates vertices when only `H` is present.
    pub fn to_vpolytope(&self) -> Result<VPolytope, FormatError> {
        self.validate()?;
        match &self.v {
            Some(rows) => Ok(VPolytope::new(self.dim, rows.iter().map(|r| DVector::from_vec(r.clone())).collect())?),
            None => Ok(self.to_hpolytope()?.vertices()?),
        }
    }
}

/// Ellipsoid document: `center`, `shape` (rows), `radius2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidFile {
    pub center: Vec<f64>,
    pub shape: Vec<Vec<f64>>,
    pub radius2: f64,
}

impl EllipsoidFile {
    pub fn from_ellipsoid(e: &Ellipsoid) -> Self {
        let s = e.shape();
        Self {
            center: e.center().iter().copied().collect(),
            shape: (0..s.nrows()).map(|r| s.row(r).iter().copied().collect()).collect(),
            radius2: e.radius2(),
        }
    }

    pub fn to_ellipsoid(&self) -> Result<Ellipsoid, FormatError> {
        let n = self.center.len();
        if self.shape.len() != n || self.shape.iter().any(|r| r.len() != n) {
            return Err(FormatError::Invalid(format!("ellipsoid shape must be {n}x{n}")));
        }
        let shape = DMatrix::from_fn(n, n, |r, c| self.shape[r][c]);
        Ok(Ellipsoid::new(DVector::from_vec(self.center.clone()), shape, self.radius2)?)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FormatError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json { path: path.display().to_string(), source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    crate::io::write_atomic(path, crate::io::to_json_string(value).as_bytes())
        .map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_file_round_trip() {
        let p = HPolytope::from_box(&[-1.0, 0.0], &[1.0, 2.0]).unwrap();
        let f = PolytopeFile::from_hpolytope(&p, true);
        assert_eq!(f.v.as_ref().unwrap().len(), 4);
        let text = crate::io::to_json_string(&f);
        let back: PolytopeFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_hpolytope().unwrap(), p);
    }

    #[test]
    fn v_only_file() {
        let f: PolytopeFile = serde_json::from_str(r#"{"dim": 2, "V": [[0,0],[1,0],[0,1]]}"#).unwrap();
        assert_eq!(f.to_hpolytope().unwrap().num_facets(), 3);
    }

    #[test]
    fn empty_set_written_as_infeasible_row() {
        let f = PolytopeFile::from_hpolytope(&HPolytope::empty(3), false);
        assert!(f.to_hpolytope().unwrap().is_empty());
    }

    #[test]
    fn malformed_rows_rejected() {
        let f: PolytopeFile = serde_json::from_str(r#"{"dim": 2, "H": [[1, 0]]}"#).unwrap();
        assert!(matches!(f.to_hpolytope(), Err(FormatError::Invalid(_))));
        let g: PolytopeFile = serde_json::from_str(r#"{"dim": 2}"#).unwrap();
        assert!(g.to_hpolytope().is_err());
    }
}
