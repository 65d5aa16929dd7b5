//! The 4-D rendezvous problem: RA_5, its cross-section at zero velocity, and
//! an SVG of that polygon in `cwh_slice.svg`.

use std::collections::BTreeMap;

use lagreach::cli::{ccw_vertices, polygon_svg};
use lagreach::lagrangian::underapproximate_level_set;
use lagreach::systems::{cwh_rendezvous, CwhParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = CwhParams::default();
    println!("omega = {:.4e} rad/s, m_d = {} kg, T_s = {} s", params.orbital_rate, params.deputy_mass, params.sampling_time);
    let problem = cwh_rendezvous(&params)?;
    let result = underapproximate_level_set(&problem)?;
    for d in &result.diagnostics {
        println!("RA_{}: {} facets, {:.3} s", d.step, d.facets, d.seconds);
    }
    let fixed = BTreeMap::from([(2, 0.0), (3, 0.0)]);
    let slice = result.last().slice(&fixed)?;
    let verts = ccw_vertices(&slice)?;
    println!("slice at zero velocity has {} vertices", verts.len());
    std::fs::write("cwh_slice.svg", polygon_svg(&verts))?;
    Ok(())
}
