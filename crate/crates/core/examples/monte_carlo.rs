//! Closed-loop trials of the tube controller from points inside RA_N.

use lagreach::lagrangian::underapproximate_level_set;
use lagreach::mcsim::{hit_and_run, simulate, NoiseMode, TubeController};
use lagreach::systems::{double_integrator, DoubleIntegratorParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = double_integrator(&DoubleIntegratorParams::default())?;
    let result = underapproximate_level_set(&problem)?;
    let ctrl = TubeController::new(&problem, &result)?;
    for (i, x0) in hit_and_run(result.last(), 5, 7).iter().enumerate() {
        let g = simulate(&problem, &ctrl, x0, i as u64, 20_000, NoiseMode::Gaussian)?;
        let e = simulate(&problem, &ctrl, x0, i as u64, 2_000, NoiseMode::InsideSet)?;
        println!(
            "x0 = ({:+.3}, {:+.3}): {:.4} success, lower bound {:.4}; noise inside E: {}/{}",
            x0[0], x0[1], g.empirical, g.lower_bound, e.successes, e.samples
        );
    }
    Ok(())
}
