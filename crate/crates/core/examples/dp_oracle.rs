//! Grid dynamic programming against the Lagrangian set: containment of RA_N
//! in the DP level set, and the time ratio between the two methods.

use std::time::Instant;

use lagreach::cli::containment_check;
use lagreach::dpgrid::{level_set_mask, stochastic_dp, StateGrid, DEFAULT_INPUT_COUNT};
use lagreach::lagrangian::underapproximate_level_set;
use lagreach::systems::{double_integrator, DoubleIntegratorParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = double_integrator(&DoubleIntegratorParams::default())?;
    let started = Instant::now();
    let result = underapproximate_level_set(&problem)?;
    let lagrangian = started.elapsed().as_secs_f64();
    for count in [41, 82] {
        let grid = StateGrid::covering(&problem, count)?;
        let started = Instant::now();
        let vg = stochastic_dp(&problem, &grid, DEFAULT_INPUT_COUNT)?;
        let dp = started.elapsed().as_secs_f64();
        let inside = level_set_mask(&vg, problem.horizon, problem.beta)?.iter().filter(|&&m| m).count();
        let values: Vec<([f64; 2], f64)> =
            grid.points().zip(vg.at_time(0)).map(|(x, &v)| ([x[0], x[1]], v)).collect();
        let report = containment_check(result.last(), &values, grid.cell_diagonal(), problem.beta, 0.02);
        println!(
            "{count}x{count}: DP {dp:.3} s ({:.0}x the Lagrangian {lagrangian:.4} s), {inside} points in L_N, \
             {} of {} interior RA_N points below beta - 0.02",
            dp / lagrangian,
            report.violations,
            report.checked
        );
    }
    Ok(())
}
