//! Robust reach-avoid sets for the sampled double integrator, N = 1..5.

use lagreach::lagrangian::underapproximate_level_set;
use lagreach::systems::{double_integrator, DoubleIntegratorParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in 1..=5 {
        let problem = double_integrator(&DoubleIntegratorParams { horizon: n, ..Default::default() })?;
        let result = underapproximate_level_set(&problem)?;
        let ra = result.last();
        let ball = ra.chebyshev_center();
        println!(
            "N={n}: E mass {:.4}, RA_N has {} facets, inscribed radius {:.4}, {:.2} ms",
            problem.per_step_mass(),
            ra.num_facets(),
            ball.radius,
            1e3 * result.total_seconds()
        );
    }
    let problem = double_integrator(&DoubleIntegratorParams::default())?;
    let result = underapproximate_level_set(&problem)?;
    println!("RA_5 vertices:");
    for v in result.last().vertices()?.points() {
        println!("  ({:+.4}, {:+.4})", v[0], v[1]);
    }
    Ok(())
}
