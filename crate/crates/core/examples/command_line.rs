//! Drives the command-line interface in-process: writes a problem file,
//! solves it and slices the result. Output goes to a temporary directory.

use lagreach::cli::{main_with_args, ProblemFile};
use lagreach::systems::{double_integrator, DoubleIntegratorParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("lagreach-example");
    let problem = double_integrator(&DoubleIntegratorParams { variance: 1e-3, ..Default::default() })?;
    let file = dir.join("problem.json");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(&file, lagreach::io::to_json_string(&ProblemFile::from_problem(&problem)))?;

    let out = dir.join("sets");
    let code = main_with_args(["lagreach", "solve", "--problem", file.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    println!("solve exited with {code}");
    let code = main_with_args([
        "lagreach",
        "slice",
        "--set",
        out.join("ra_5.json").to_str().unwrap(),
        "--fix",
        "1=0",
        "--out",
        dir.join("slice.json").to_str().unwrap(),
    ]);
    println!("slice exited with {code}; files in {}", dir.display());
    Ok(())
}
