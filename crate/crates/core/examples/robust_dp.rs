//! The minmax recursion over a finite disturbance sample, compared with
//! membership in RA_N.

use lagreach::dpgrid::{robust_dp, StateGrid, DEFAULT_INPUT_COUNT};
use lagreach::geom::VPolytope;
use lagreach::lagrangian::{underapproximate_level_set, DisturbanceSet};
use lagreach::systems::{double_integrator, DoubleIntegratorParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = double_integrator(&DoubleIntegratorParams::default())?;
    let result = underapproximate_level_set(&problem)?;
    let DisturbanceSet::Ellipsoid(e) = &result.disturbance else { unreachable!() };
    let sample: VPolytope = e.boundary_points(16);
    let grid = StateGrid::covering(&problem, 41)?;
    let j = robust_dp(&problem, &sample, &grid, DEFAULT_INPUT_COUNT, problem.horizon)?;
    let zero = j.zero_set();
    let ra = result.last();
    let (mut agree, mut near, mut far) = (0, 0, 0);
    for (idx, &z) in zero.iter().enumerate() {
        let x = grid.point(idx);
        if z == ra.contains(&x) {
            agree += 1;
        } else if ra.depth(&x).abs() <= grid.cell_diagonal() {
            near += 1;
        } else {
            far += 1;
        }
    }
    println!("{agree} points agree, {near} differ within one cell of the boundary, {far} differ elsewhere");
    Ok(())
}
