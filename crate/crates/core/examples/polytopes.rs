//! Polytope operations: vertex and facet forms, Minkowski sum and
//! difference, support functions and slices.

use std::collections::BTreeMap;

use lagreach::geom::{Ellipsoid, HPolytope, Support, VPolytope};
use nalgebra::dvector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let square = HPolytope::from_box(&[-1.0, -1.0], &[1.0, 1.0])?;
    let tri = VPolytope::from_rows(&[vec![0.0, 0.0], vec![0.2, 0.0], vec![0.0, 0.2]])?;

    let sum = square.vertices()?.minkowski_sum(&tri)?.facets()?;
    println!("square + triangle: {} facets", sum.num_facets());

    let ball = Ellipsoid::ball(dvector![0.0, 0.0], 0.25)?;
    let shrunk = square.minkowski_diff(&ball)?;
    println!("square - ball: support along x = {}", shrunk.support(&dvector![1.0, 0.0])?);

    let cube = HPolytope::from_box(&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0])?;
    let face = cube.slice(&BTreeMap::from([(2, 1.5)]))?;
    println!("cube slice at z = 1.5: {} vertices", face.vertices()?.len());

    let back = cube.vertices()?.facets()?;
    println!("cube H -> V -> H equal: {}", back.set_eq_tol(&cube, 1e-9)?);
    Ok(())
}
