use std::path::Path;
use std::process::{Command, Output};

use lagreach::cli::{read_solve_output, write_solve_output, CheckReport, ProblemFile};
use lagreach::geom::io::{read_json, PolytopeFile};
use lagreach::geom::Ellipsoid;
use lagreach::lagrangian::{robust_reach_avoid, underapproximate_level_set, DisturbanceSet};
use lagreach::systems::{double_integrator, DoubleIntegratorParams};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lagreach")).args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn solve_writes_sets_that_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("di");
    let o = run(&["solve", "--model", "double-integrator", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let problem = double_integrator(&DoubleIntegratorParams::default()).unwrap();
    let result = underapproximate_level_set(&problem).unwrap();
    for k in 0..=5 {
        let set = read_json::<PolytopeFile>(&out.join(format!("ra_{k}.json"))).unwrap().to_hpolytope().unwrap();
        assert!(set.set_eq_tol(result.set(k), 1e-7).unwrap(), "ra_{k}");
    }
    let (summary, back) = read_solve_output(&out).unwrap();
    assert_eq!(summary.horizon, 5);
    assert_eq!(summary.empty_from, None);
    assert_eq!(back.disturbance, result.disturbance);
}

#[test]
fn viability_mode_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--model", "di", "--viability", "--horizon", "3", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    for k in 0..=3 {
        assert!(dir.path().join(format!("viab_{k}.json")).exists());
    }
}

#[test]
fn parse_errors_exit_one_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    std::fs::write(&file, "{\n  \"system\": {\"model\": \"cwh\"},\n  \"beta\": [1]\n}\n").unwrap();
    let o = run(&["solve", "--problem", p(&file), "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
    let o = run(&["solve", "--model", "pendulum", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn empty_set_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let problem = double_integrator(&DoubleIntegratorParams::default()).unwrap();
    let mut file = ProblemFile::from_problem(&problem);
    // A target far smaller than the disturbance set leaves nothing after one step.
    file.target_set = Some(PolytopeFile {
        dim: 2,
        h: Some(vec![
            vec![1.0, 0.0, 0.01],
            vec![-1.0, 0.0, 0.01],
            vec![0.0, 1.0, 0.01],
            vec![0.0, -1.0, 0.01],
        ]),
        v: None,
    });
    let path = dir.path().join("tiny.json");
    std::fs::write(&path, lagreach::io::to_json_string(&file)).unwrap();
    let out = dir.path().join("out");
    let o = run(&["solve", "--problem", p(&path), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty from step 1"));
}

#[test]
fn dp_rejects_four_dimensional_models() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["dp", "--model", "cwh", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_passes_and_catches_an_inflated_set() {
    let dir = tempfile::tempdir().unwrap();
    let (lag, dp) = (dir.path().join("lag"), dir.path().join("dp"));
    assert_eq!(run(&["solve", "--model", "di", "--out", p(&lag)]).status.code(), Some(0));
    let o = run(&["dp", "--model", "di", "--grid", "41", "--out", p(&dp)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dp.join("value_5.csv").exists() && dp.join("levelset.csv").exists());
    let o = run(&["check", "--lagrangian", p(&lag), "--dp", p(&dp), "--beta", "0.8"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));

    // Negative control: ignoring the noise (E = {0}) inflates RA_5 past the
    // level set.
    let problem = double_integrator(&DoubleIntegratorParams::default()).unwrap();
    let inflated = robust_reach_avoid(&problem, &DisturbanceSet::origin(2), 5).unwrap();
    let bad = dir.path().join("inflated");
    write_solve_output(&bad, &problem, &inflated, false).unwrap();
    let o = run(&["check", "--lagrangian", p(&bad), "--dp", p(&dp), "--beta", "0.8"]);
    assert_eq!(o.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let report: CheckReport = serde_json::from_str(&stdout[..stdout.rfind('}').unwrap() + 1]).unwrap();
    assert!(report.violations > 0);
}

#[test]
fn check_on_empty_set_is_vacuous() {
    let dir = tempfile::tempdir().unwrap();
    let problem = double_integrator(&DoubleIntegratorParams { horizon: 2, ..Default::default() }).unwrap();
    let big = DisturbanceSet::Ellipsoid(Ellipsoid::ball(nalgebra::DVector::zeros(2), 0.9).unwrap());
    let empty = robust_reach_avoid(&problem, &big, 2).unwrap();
    assert!(empty.last().is_empty());
    let lag = dir.path().join("lag");
    write_solve_output(&lag, &problem, &empty, false).unwrap();
    let dp = dir.path().join("dp");
    assert_eq!(run(&["dp", "--model", "di", "--horizon", "2", "--grid", "21", "--out", p(&dp)]).status.code(), Some(0));
    let o = run(&["check", "--lagrangian", p(&lag), "--dp", p(&dp), "--beta", "0.8"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let sets = dir.path().join("sets");
    assert_eq!(run(&["solve", "--model", "di", "--out", p(&sets)]).status.code(), Some(0));
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = run(&["simulate", "--sets", p(&sets), "--samples", "2000", "--points", "3", "--seed", "5", "--out", p(out)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let o = run(&["simulate", "--sets", p(&sets), "--samples", "200", "--points", "2", "--noise", "inside-set"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn slice_writes_polygon_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cube = dir.path().join("cube.json");
    std::fs::write(&cube, r#"{"dim": 3, "V": [[0,0,0],[1,0,0],[0,2,0],[1,2,0],[0,0,1],[1,0,1],[0,2,1],[1,2,1]]}"#).unwrap();
    let (out, svg) = (dir.path().join("s.json"), dir.path().join("s.svg"));
    let o = run(&["slice", "--set", p(&cube), "--fix", "2=0.5", "--out", p(&out), "--svg", p(&svg)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let sliced = read_json::<PolytopeFile>(&out).unwrap().to_hpolytope().unwrap();
    let rect = lagreach::geom::HPolytope::from_box(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
    assert!(sliced.set_eq_tol(&rect, 1e-9).unwrap());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<polygon").count(), 1);
    assert!(text.contains("viewBox=\"-0.05 -2.1 1.1 2.2\""), "{text}");

    let o = run(&["slice", "--set", p(&cube), "--fix", "2=5", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty"));
    assert!(read_json::<PolytopeFile>(&out).unwrap().to_hpolytope().unwrap().is_empty());

    let o = run(&["slice", "--set", p(&cube), "--fix", "z=1", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
}
