//! Random polytopes and the geometry properties shared by the property suite
//! and the acceptance run.

#![allow(dead_code)]

use lagreach::geom::{vertices_exhaustive, Ellipsoid, HPolytope, Support, VPolytope};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

/// A box `[−h, h]` cut by up to `12 − 2d` random halfspaces that keep the
/// origin inside.
#[derive(Debug, Clone)]
pub struct Instance {
    pub s: HPolytope,
    /// Points of a small set around the origin.
    pub e: Vec<DVector<f64>>,
    /// Extra points; `conv(e ∪ extra) ⊇ conv(e)`.
    pub extra: Vec<DVector<f64>>,
    /// Directions and sample points in `[−1, 1]^d`.
    pub probes: Vec<DVector<f64>>,
}

fn point(d: usize, r: f64) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-r..r, d).prop_map(DVector::from_vec)
}

pub fn instance() -> impl Strategy<Value = Instance> {
    (2usize..=4).prop_flat_map(|d| {
        (
            prop::collection::vec(0.8f64..2.0, d),
            prop::collection::vec((point(d, 1.0), 0.3f64..1.5), 0..=12 - 2 * d),
            prop::collection::vec(point(d, 0.2), 1..=6),
            prop::collection::vec(point(d, 0.3), 1..=3),
            prop::collection::vec(point(d, 1.0), 100),
        )
            .prop_filter_map("degenerate cut normal", move |(half, cuts, e, extra, probes)| {
                if cuts.iter().any(|(a, _)| a.norm() < 0.1) {
                    return None;
                }
                let m = 2 * d + cuts.len();
                let mut a = DMatrix::zeros(m, d);
                let mut b = DVector::zeros(m);
                for i in 0..d {
                    a[(2 * i, i)] = 1.0;
                    a[(2 * i + 1, i)] = -1.0;
                    b[2 * i] = half[i];
                    b[2 * i + 1] = half[i];
                }
                for (k, (n, off)) in cuts.iter().enumerate() {
                    a.row_mut(2 * d + k).copy_from(&(n / n.norm()).transpose());
                    b[2 * d + k] = *off;
                }
                Some(Instance { s: HPolytope::new(a, b).ok()?, e, extra, probes })
            })
    })
}

pub fn config(cases: u32) -> Config {
    Config { cases, failure_persistence: None, ..Config::default() }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn geom<T>(r: Result<T, lagreach::geom::GeomError>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

/// `facets(vertices(S)) = S`, and the vertices match brute-force enumeration.
pub fn round_trip(inst: &Instance) -> Result<(), TestCaseError> {
    let v = geom(inst.s.vertices())?;
    let back = geom(v.facets())?;
    check(geom(back.set_eq_tol(&inst.s, 1e-7))?, || "facets(vertices(S)) != S".into())?;
    let oracle = vertices_exhaustive(inst.s.a(), inst.s.b());
    check(oracle.len() == v.len(), || format!("{} vertices, brute force finds {}", v.len(), oracle.len()))?;
    for p in &oracle {
        check(v.points().iter().any(|q| (p - q).amax() < 1e-7), || format!("missing vertex {p}"))?;
    }
    Ok(())
}

/// `(S ⊖ E) ⊕ E ⊆ S`.
pub fn difference_then_sum(inst: &Instance) -> Result<(), TestCaseError> {
    let d = inst.s.dim();
    let e = geom(VPolytope::new(d, inst.e.clone()))?;
    let inner = geom(inst.s.minkowski_diff(&e))?;
    if inner.is_empty() {
        return Ok(());
    }
    let sum = geom(geom(inner.vertices())?.minkowski_sum(&e))?;
    for p in sum.points() {
        check(inst.s.contains_tol(p, 1e-7), || format!("{p} escapes S"))?;
    }
    // For a box and a ball the two sides agree along the axes.
    let (lo, hi) = inst.s.bounding_box().unwrap();
    let bx = geom(HPolytope::from_box(lo.as_slice(), hi.as_slice()))?;
    let r = 0.1;
    let shrunk = geom(bx.minkowski_diff(&geom(Ellipsoid::ball(DVector::zeros(d), r))?))?;
    for i in 0..d {
        for sign in [1.0, -1.0] {
            let mut a = DVector::zeros(d);
            a[i] = sign;
            let lhs = geom(shrunk.support(&a))? + r;
            let rhs = geom(bx.support(&a))?;
            check((lhs - rhs).abs() < 1e-9, || format!("box/ball support mismatch along {a}"))?;
        }
    }
    Ok(())
}

/// `S ⊖ {0} = S` and `S ⊕ {0} = S`.
pub fn zero_identity(inst: &Instance) -> Result<(), TestCaseError> {
    let d = inst.s.dim();
    let zero = Ellipsoid::point(DVector::zeros(d));
    check(geom(geom(inst.s.minkowski_diff(&zero))?.set_eq_tol(&inst.s, 1e-9))?, || "S - {0} != S".into())?;
    let origin = geom(VPolytope::new(d, vec![DVector::zeros(d)]))?;
    let sum = geom(geom(geom(inst.s.vertices())?.minkowski_sum(&origin))?.facets())?;
    check(geom(sum.set_eq_tol(&inst.s, 1e-7))?, || "S + {0} != S".into())
}

/// `E₁ ⊆ E₂ ⇒ S ⊖ E₂ ⊆ S ⊖ E₁`.
pub fn difference_monotone(inst: &Instance) -> Result<(), TestCaseError> {
    let d = inst.s.dim();
    let e1 = geom(VPolytope::new(d, inst.e.clone()))?;
    let e2 = geom(VPolytope::new(d, inst.e.iter().chain(&inst.extra).cloned().collect()))?;
    let small = geom(inst.s.minkowski_diff(&e2))?;
    let large = geom(inst.s.minkowski_diff(&e1))?;
    check(geom(small.subset_of(&large))?, || "S - E2 not inside S - E1".into())
}

/// Support through the vertex list equals the LP value.
pub fn support_consistency(inst: &Instance) -> Result<(), TestCaseError> {
    let v = geom(inst.s.vertices())?;
    for a in inst.probes.iter().filter(|a| a.norm() > 1e-3) {
        let hv = geom(v.support(a))?;
        let hl = geom(inst.s.support(a))?;
        check((hv - hl).abs() <= 1e-8 * (1.0 + hl.abs()), || format!("support along {a}: {hv} vs {hl}"))?;
    }
    Ok(())
}

/// Removing redundant rows does not change membership of random points.
pub fn reduce_sound(inst: &Instance) -> Result<(), TestCaseError> {
    let d = inst.s.dim();
    // Add a redundant copy of the first row before reducing.
    let m = inst.s.num_facets();
    let mut a = DMatrix::zeros(m + 1, d);
    a.view_mut((0, 0), (m, d)).copy_from(inst.s.a());
    a.row_mut(m).copy_from(&inst.s.a().row(0));
    let mut b = DVector::zeros(m + 1);
    b.rows_mut(0, m).copy_from(inst.s.b());
    b[m] = inst.s.b()[0] + 0.5;
    let padded = geom(HPolytope::new(a, b))?;
    let reduced = padded.reduce();
    check(reduced.num_facets() <= m, || "redundant row survived".into())?;
    let (lo, hi) = inst.s.bounding_box().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
    for _ in 0..1000 {
        // Uniform over the bounding box widened by 10% on each side.
        let x = DVector::from_fn(d, |j, _| {
            let w = hi[j] - lo[j];
            rng.random_range(lo[j] - 0.1 * w..hi[j] + 0.1 * w)
        });
        let margin = padded.slacks(&x).iter().map(|s| s.abs()).fold(f64::INFINITY, f64::min);
        if margin < 1e-9 {
            continue;
        }
        check(padded.contains(&x) == reduced.contains(&x), || format!("membership of {x} changed"))?;
    }
    Ok(())
}

pub type Property = fn(&Instance) -> Result<(), TestCaseError>;

pub const PROPERTIES: [(&str, Property); 6] = [
    ("H-V round trip", round_trip),
    ("(S - E) + E inside S", difference_then_sum),
    ("S - {0} = S", zero_identity),
    ("difference monotone in E", difference_monotone),
    ("support LP consistency", support_consistency),
    ("reduce keeps membership", reduce_sound),
];

/// Runs one property over `cases` deterministic instances.
pub fn run_property(prop: Property, cases: u32) -> Result<(), String> {
    let mut runner = TestRunner::new_with_rng(config(cases), proptest::test_runner::TestRng::deterministic_rng(
        proptest::test_runner::RngAlgorithm::ChaCha,
    ));
    runner.run(&instance(), |inst| prop(&inst)).map_err(|e| e.to_string())
}
