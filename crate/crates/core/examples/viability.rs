//! Finite-horizon viable sets of the double integrator.

use lagreach::lagrangian::viability;
use lagreach::systems::{double_integrator, DoubleIntegratorParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = double_integrator(&DoubleIntegratorParams::default())?;
    let result = viability(&problem, 8)?;
    for (k, set) in result.sets.iter().enumerate() {
        let (lo, hi) = set.bounding_box().expect("viable sets are bounded");
        println!("Viab_{k}: {} facets, velocity in [{:+.3}, {:+.3}]", set.num_facets(), lo[1], hi[1]);
    }
    Ok(())
}
