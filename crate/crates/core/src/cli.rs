//! Command-line front end: problem files, the `solve`, `dp`, `check`,
//! `simulate` and `slice` subcommands, and SVG output for 2-D sets.
//!
//! Exit codes: 0 on success, 1 on bad input or a failed run, 2 when `solve`
//! finds an empty set, and 1 when `check` or `simulate` reports a violation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dpgrid::{self, DpError, StateGrid, DEFAULT_INPUT_COUNT};
use crate::geom::io::{read_json, write_json, EllipsoidFile, FormatError, PolytopeFile};
use crate::geom::{GeomError, HPolytope};
use crate::io::write_atomic;
use crate::lagrangian::{
    underapproximate_level_set, viability, DisturbanceSet, LinearSystem, ReachError, ReachProblem, ReachResult,
    StepDiagnostics,
};
use crate::mcsim::{self, NoiseMode, SimError, SimReport, TubeController};
use crate::prob::GaussianDisturbance;
use crate::systems::ModelSpec;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Problem { path: String, message: String },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Reach(#[from] ReachError),
    #[error(transparent)]
    Dp(#[from] DpError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// `A` and `B` given directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSystem {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
}

/// Either a built-in model (`{"model": "cwh", ...params}`) or explicit
/// matrices (`{"A": ..., "B": ...}`).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SystemSpec {
    Model(ModelSpec),
    Matrices(MatrixSystem),
}

impl<'de> Deserialize<'de> for SystemSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let value = serde_json::Value::deserialize(d)?;
        if value.get("model").is_some() {
            serde_json::from_value(value).map(Self::Model).map_err(|e| D::Error::custom(format!("system: {e}")))
        } else {
            serde_json::from_value(value).map(Self::Matrices).map_err(|e| D::Error::custom(format!("system: {e}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceSpec {
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

/// A reach-avoid problem on disk. With a built-in model every other key is
/// an optional override; with explicit matrices all of them are required.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub system: SystemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disturbance: Option<DisturbanceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub safe_set: Option<PolytopeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_set: Option<PolytopeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_set: Option<PolytopeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

fn matrix(rows: &[Vec<f64>], field: &str) -> Result<DMatrix<f64>, String> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return Err(format!("{field}: matrix is empty"));
    }
    if let Some(r) = rows.iter().position(|r| r.len() != cols) {
        return Err(format!("{field}: row {r} has {} entries, expected {cols}", rows[r].len()));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]))
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    /// The explicit-matrix form of `p`.
    pub fn from_problem(p: &ReachProblem) -> Self {
        let d = p.system.disturbance();
        Self {
            system: SystemSpec::Matrices(MatrixSystem { a: rows_of(p.system.a()), b: rows_of(p.system.b()) }),
            disturbance: Some(DisturbanceSpec {
                mean: d.mean().iter().copied().collect(),
                covariance: rows_of(d.covariance()),
            }),
            safe_set: Some(PolytopeFile::from_hpolytope(&p.safe, false)),
            target_set: Some(PolytopeFile::from_hpolytope(&p.target, false)),
            input_set: Some(PolytopeFile::from_vpolytope(&p.input)),
            beta: Some(p.beta),
            horizon: Some(p.horizon),
        }
    }

    /// Builds and validates the problem; errors name the offending field.
    pub fn resolve(&self) -> Result<ReachProblem, String> {
        let disturbance = match &self.disturbance {
            Some(spec) => {
                let mean = DVector::from_vec(spec.mean.clone());
                let cov = matrix(&spec.covariance, "disturbance.covariance")?;
                Some(GaussianDisturbance::new(mean, cov).map_err(|e| format!("disturbance: {e}"))?)
            }
            None => None,
        };
        let poly = |f: &Option<PolytopeFile>, field: &str| -> Result<Option<HPolytope>, String> {
            f.as_ref().map(|f| f.to_hpolytope().map_err(|e| format!("{field}: {e}"))).transpose()
        };
        let safe = poly(&self.safe_set, "safe_set")?;
        let target = poly(&self.target_set, "target_set")?;
        let input = self
            .input_set
            .as_ref()
            .map(|f| f.to_vpolytope().map_err(|e| format!("input_set: {e}")))
            .transpose()?;
        let base = match &self.system {
            SystemSpec::Model(spec) => Some(spec.build().map_err(|e| format!("system: {e}"))?),
            SystemSpec::Matrices(_) => None,
        };
        let system = match (&self.system, &base) {
            (SystemSpec::Matrices(m), _) => {
                let a = matrix(&m.a, "system.A")?;
                let b = matrix(&m.b, "system.B")?;
                let w = disturbance.clone().ok_or("disturbance: required with explicit matrices")?;
                LinearSystem::new(a, b, w).map_err(|e| format!("system: {e}"))?
            }
            (SystemSpec::Model(_), Some(p)) => match &disturbance {
                Some(w) => p.system.with_disturbance(w.clone()).map_err(|e| format!("disturbance: {e}"))?,
                None => p.system.clone(),
            },
            (SystemSpec::Model(_), None) => unreachable!("model problems are built above"),
        };
        let pick = |own: Option<HPolytope>, from: Option<&HPolytope>, field: &str| {
            own.or_else(|| from.cloned()).ok_or(format!("{field}: required with explicit matrices"))
        };
        let safe = pick(safe, base.as_ref().map(|p| &p.safe), "safe_set")?;
        let target = pick(target, base.as_ref().map(|p| &p.target), "target_set")?;
        let input = input
            .or_else(|| base.as_ref().map(|p| p.input.clone()))
            .ok_or("input_set: required with explicit matrices")?;
        let beta = self.beta.or(base.as_ref().map(|p| p.beta)).ok_or("beta: required with explicit matrices")?;
        let horizon =
            self.horizon.or(base.as_ref().map(|p| p.horizon)).ok_or("horizon: required with explicit matrices")?;
        ReachProblem::new(system, safe, target, input, beta, horizon).map_err(|e| e.to_string())
    }
}

pub fn load_problem(path: &Path) -> Result<ReachProblem, CliError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let problem = |message: String| CliError::Problem { path: path.display().to_string(), message };
    ProblemFile::parse(&text).map_err(problem)?.resolve().map_err(problem)
}

#[derive(Debug, Parser)]
#[command(name = "lagreach", version, about = "Reach-avoid level-set underapproximation for linear systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute RA_0 … RA_N (or viable sets) and write them as polytope files.
    Solve(SolveArgs),
    /// Grid dynamic programming oracle for 2-D problems.
    Dp(DpArgs),
    /// Compare a solve directory against a dp directory.
    Check(CheckArgs),
    /// Monte Carlo runs of the tube controller.
    Simulate(SimulateArgs),
    /// Fix coordinates of a polytope and write the remaining cross-section.
    Slice(SliceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Problem file.
    #[arg(long, conflicts_with = "model")]
    pub problem: Option<PathBuf>,
    /// Built-in model: double-integrator or cwh.
    #[arg(long)]
    pub model: Option<String>,
    /// Override the confidence level β.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Override the horizon N.
    #[arg(long)]
    pub horizon: Option<usize>,
}

impl ProblemArgs {
    pub fn load(&self) -> Result<ReachProblem, CliError> {
        let mut p = match (&self.problem, &self.model) {
            (Some(path), _) => load_problem(path)?,
            (None, Some(name)) => ModelSpec::from_name(name)
                .ok_or_else(|| CliError::Usage(format!("unknown model `{name}` (double-integrator, cwh)")))?
                .build()?,
            (None, None) => return Err(CliError::Usage("one of --problem or --model is required".into())),
        };
        if let Some(beta) = self.beta {
            p = p.with_beta(beta)?;
        }
        if let Some(n) = self.horizon {
            p = p.with_horizon(n)?;
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Viable sets (target = safe set, no disturbance) instead of RA sets.
    #[arg(long)]
    pub viability: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DpArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Points per axis.
    #[arg(long, default_value_t = 41)]
    pub grid: usize,
    /// Points per input axis.
    #[arg(long, default_value_t = DEFAULT_INPUT_COUNT)]
    pub inputs: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Output directory of `solve`.
    #[arg(long)]
    pub lagrangian: PathBuf,
    /// Output directory of `dp`.
    #[arg(long)]
    pub dp: PathBuf,
    #[arg(long)]
    pub beta: f64,
    /// Values down to `beta − tol` count as inside.
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Noise {
    Gaussian,
    InsideSet,
    Zero,
}

impl From<Noise> for NoiseMode {
    fn from(n: Noise) -> Self {
        match n {
            Noise::Gaussian => NoiseMode::Gaussian,
            Noise::InsideSet => NoiseMode::InsideSet,
            Noise::Zero => NoiseMode::Zero,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Defaults to the `problem.json` written by `solve`.
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Output directory of `solve`.
    #[arg(long)]
    pub sets: PathBuf,
    /// Trials per initial state.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial states drawn from RA_N by hit-and-run.
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = Noise::Gaussian)]
    pub noise: Noise,
    /// Write the reports here as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SliceArgs {
    #[arg(long)]
    pub set: PathBuf,
    /// Fixed coordinates, 0-based: "2=0,3=0".
    #[arg(long)]
    pub fix: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

/// Written by `solve` as `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub mode: String,
    pub state_dim: usize,
    pub beta: f64,
    pub horizon: usize,
    pub per_step_mass: f64,
    pub steps: Vec<StepDiagnostics>,
    pub total_seconds: f64,
    pub empty_from: Option<usize>,
    pub files: Vec<String>,
}

/// Written by `dp` as `dp_summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpSummary {
    pub grid: [usize; 2],
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub inputs: usize,
    pub horizon: usize,
    pub beta: f64,
    pub seconds: f64,
    pub level_set_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub beta: f64,
    pub tol: f64,
    pub margin: f64,
    pub checked: usize,
    pub violations: usize,
    pub worst_value: Option<f64>,
}

fn set_file_name(viability: bool, k: usize) -> String {
    if viability {
        format!("viab_{k}.json")
    } else {
        format!("ra_{k}.json")
    }
}

/// Writes the sets, `disturbance.json`, `problem.json` and `summary.json`.
pub fn write_solve_output(
    dir: &Path,
    problem: &ReachProblem,
    result: &ReachResult,
    is_viability: bool,
) -> Result<SolveSummary, CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut files = Vec::new();
    for (k, set) in result.sets.iter().enumerate() {
        let name = set_file_name(is_viability, k);
        write_json(&dir.join(&name), &PolytopeFile::from_hpolytope(set, true))?;
        files.push(name);
    }
    match &result.disturbance {
        DisturbanceSet::Ellipsoid(e) => write_json(&dir.join("disturbance.json"), &EllipsoidFile::from_ellipsoid(e))?,
        DisturbanceSet::Polytope(p) => write_json(&dir.join("disturbance.json"), &PolytopeFile::from_vpolytope(p))?,
    }
    write_json(&dir.join("problem.json"), &ProblemFile::from_problem(problem))?;
    let summary = SolveSummary {
        mode: if is_viability { "viability" } else { "level-set" }.into(),
        state_dim: problem.system.state_dim(),
        beta: problem.beta,
        horizon: result.horizon(),
        per_step_mass: if is_viability { 1.0 } else { problem.per_step_mass() },
        steps: result.diagnostics.clone(),
        total_seconds: result.total_seconds(),
        empty_from: result.empty_from,
        files,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Reads back what [`write_solve_output`] wrote.
pub fn read_solve_output(dir: &Path) -> Result<(SolveSummary, ReachResult), CliError> {
    let summary: SolveSummary = read_json(&dir.join("summary.json"))?;
    let sets = summary
        .files
        .iter()
        .map(|f| read_json::<PolytopeFile>(&dir.join(f))?.to_hpolytope())
        .collect::<Result<Vec<_>, _>>()?;
    let path = dir.join("disturbance.json");
    let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
    let disturbance = match serde_json::from_str::<EllipsoidFile>(&text) {
        Ok(e) => DisturbanceSet::Ellipsoid(e.to_ellipsoid()?),
        Err(_) => DisturbanceSet::Polytope(read_json::<PolytopeFile>(&path)?.to_vpolytope()?),
    };
    let result =
        ReachResult { sets, disturbance, diagnostics: summary.steps.clone(), empty_from: summary.empty_from };
    Ok((summary, result))
}

pub fn cmd_solve(args: &SolveArgs) -> Result<i32, CliError> {
    let problem = args.problem.load()?;
    let result = if args.viability {
        viability(&problem, problem.horizon)?
    } else {
        underapproximate_level_set(&problem)?
    };
    let summary = write_solve_output(&args.out, &problem, &result, args.viability)?;
    for d in &summary.steps {
        println!(
            "step {}: {} facets, {} vertices, {:.3} s",
            d.step,
            d.facets,
            d.vertices.map_or("-".into(), |v| v.to_string()),
            d.seconds
        );
    }
    println!("total {:.3} s, written to {}", summary.total_seconds, args.out.display());
    Ok(match summary.empty_from {
        Some(k) => {
            eprintln!("set is empty from step {k}");
            2
        }
        None => 0,
    })
}

pub fn cmd_dp(args: &DpArgs) -> Result<i32, CliError> {
    let problem = args.problem.load()?;
    if problem.system.state_dim() != 2 {
        return Err(DpError::NotPlanar.into());
    }
    let grid = StateGrid::covering(&problem, args.grid)?;
    let started = Instant::now();
    let vg = dpgrid::stochastic_dp(&problem, &grid, args.inputs)?;
    let seconds = started.elapsed().as_secs_f64();
    for k in 0..=vg.horizon() {
        vg.write_csv(k, &args.out.join(format!("value_{k}.csv")))?;
    }
    let mask = dpgrid::level_set_mask(&vg, vg.horizon(), problem.beta)?;
    let path = args.out.join("levelset.csv");
    write_atomic(&path, dpgrid::mask_to_csv(&grid, &mask).as_bytes()).map_err(io_err(&path))?;
    let summary = DpSummary {
        grid: grid.counts(),
        lo: grid.lo(),
        hi: grid.hi(),
        inputs: args.inputs,
        horizon: vg.horizon(),
        beta: problem.beta,
        seconds,
        level_set_points: mask.iter().filter(|&&m| m).count(),
    };
    write_json(&args.out.join("dp_summary.json"), &summary)?;
    println!(
        "{}x{} grid, {} inputs: {:.3} s, {} points with V_0 >= {}",
        summary.grid[0], summary.grid[1], summary.inputs, seconds, summary.level_set_points, problem.beta
    );
    Ok(0)
}

/// `(x, V)` rows of a value CSV.
pub fn read_value_csv(path: &Path) -> Result<Vec<([f64; 2], f64)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let bad = |line: usize| CliError::Problem { path: path.display().to_string(), message: format!("line {line}: expected x1,x2,V") };
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let v: Vec<f64> = l.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad(i + 1))?;
            match v[..] {
                [x1, x2, val] => Ok(([x1, x2], val)),
                _ => Err(bad(i + 1)),
            }
        })
        .collect()
}

/// Grid points at least one cell diagonal inside `ra` must have
/// `V ≥ beta − tol`.
pub fn containment_check(
    ra: &HPolytope,
    values: &[([f64; 2], f64)],
    margin: f64,
    beta: f64,
    tol: f64,
) -> CheckReport {
    let mut checked = 0;
    let mut violations = 0;
    let mut worst: Option<f64> = None;
    for (x, v) in values {
        if ra.depth(&DVector::from_column_slice(x)) < margin {
            continue;
        }
        checked += 1;
        worst = Some(worst.map_or(*v, |w| w.min(*v)));
        if *v < beta - tol {
            violations += 1;
        }
    }
    CheckReport { beta, tol, margin, checked, violations, worst_value: worst }
}

pub fn cmd_check(args: &CheckArgs) -> Result<i32, CliError> {
    let (summary, result) = read_solve_output(&args.lagrangian)?;
    let dp: DpSummary = read_json(&args.dp.join("dp_summary.json"))?;
    if summary.state_dim != 2 {
        return Err(DpError::NotPlanar.into());
    }
    if dp.horizon > summary.horizon {
        return Err(CliError::Usage(format!(
            "dp horizon {} exceeds the {} steps in {}",
            dp.horizon,
            summary.horizon,
            args.lagrangian.display()
        )));
    }
    let grid = StateGrid::new(dp.lo, dp.hi, dp.grid)?;
    let values = read_value_csv(&args.dp.join("value_0.csv"))?;
    let ra = result.set(dp.horizon);
    if ra.is_empty() {
        eprintln!("warning: RA_{} is empty, the check passes vacuously", dp.horizon);
    }
    let report = containment_check(ra, &values, grid.cell_diagonal(), args.beta, args.tol);
    println!("{}", crate::io::to_json_string(&report).trim_end());
    println!("{} violations among {} interior points", report.violations, report.checked);
    Ok(i32::from(report.violations > 0))
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<i32, CliError> {
    let (summary, result) = read_solve_output(&args.sets)?;
    let problem = if args.problem.problem.is_some() || args.problem.model.is_some() {
        args.problem.load()?
    } else {
        let mut p = load_problem(&args.sets.join("problem.json"))?;
        if let Some(beta) = args.problem.beta {
            p = p.with_beta(beta)?;
        }
        p
    };
    if summary.empty_from.is_some_and(|k| k <= summary.horizon) {
        return Err(SimError::TubeInfeasible(summary.empty_from.unwrap_or_default()).into());
    }
    let ctrl = TubeController::new(&problem, &result)?;
    let starts = mcsim::hit_and_run(result.last(), args.points, args.seed);
    let threshold = problem.beta - 0.01;
    let mut reports: Vec<SimReport> = Vec::with_capacity(starts.len());
    for (i, x0) in starts.iter().enumerate() {
        let r = mcsim::simulate(&problem, &ctrl, x0, args.seed.wrapping_add(i as u64), args.samples, args.noise.into())?;
        println!(
            "x0 = {:?}: {}/{} successes, lower bound {:.5}{}",
            r.x0,
            r.successes,
            r.samples,
            r.lower_bound,
            if r.lower_bound >= threshold { "" } else { "  BELOW" }
        );
        reports.push(r);
    }
    if let Some(out) = &args.out {
        write_json(out, &reports)?;
    }
    let failed = reports.iter().filter(|r| r.lower_bound < threshold).count();
    println!("{failed} of {} initial states below {threshold}", reports.len());
    Ok(i32::from(failed > 0))
}

/// Parses `"i=v,j=w"` into coordinate assignments (0-based indices).
pub fn parse_fix(s: &str) -> Result<BTreeMap<usize, f64>, CliError> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || CliError::Usage(format!("bad --fix entry `{part}`, expected index=value"));
        let (i, v) = part.split_once('=').ok_or_else(bad)?;
        let i: usize = i.trim().parse().map_err(|_| bad())?;
        let v: f64 = v.trim().parse().map_err(|_| bad())?;
        if out.insert(i, v).is_some() {
            return Err(CliError::Usage(format!("coordinate {i} fixed twice")));
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("--fix needs at least one index=value".into()));
    }
    Ok(out)
}

/// Vertices of a 2-D polytope in counterclockwise order.
pub fn ccw_vertices(p: &HPolytope) -> Result<Vec<[f64; 2]>, CliError> {
    if p.dim() != 2 {
        return Err(CliError::Usage(format!("polygon output needs a 2-D set, got dimension {}", p.dim())));
    }
    if p.is_empty() {
        return Ok(Vec::new());
    }
    let mut pts: Vec<[f64; 2]> = p.vertices()?.points().iter().map(|v| [v[0], v[1]]).collect();
    let n = pts.len() as f64;
    let c = pts.iter().fold([0.0, 0.0], |acc, v| [acc[0] + v[0] / n, acc[1] + v[1] / n]);
    pts.sort_by(|u, v| {
        let au = (u[1] - c[1]).atan2(u[0] - c[0]);
        let av = (v[1] - c[1]).atan2(v[0] - c[0]);
        au.total_cmp(&av)
    });
    Ok(pts)
}

/// Shortest decimal within 10 significant digits of `v`.
fn svg_num(v: f64) -> f64 {
    format!("{v:.9e}").parse().expect("formatted float parses")
}

/// One polygon in data coordinates (y up), viewBox padded by 5% per side.
pub fn polygon_svg(vertices: &[[f64; 2]]) -> String {
    let mut svg = String::new();
    if vertices.is_empty() {
        svg.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\"></svg>\n");
        return svg;
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in vertices {
        for i in 0..2 {
            lo[i] = lo[i].min(v[i]);
            hi[i] = hi[i].max(v[i]);
        }
    }
    let w = (hi[0] - lo[0]).max(1e-12);
    let h = (hi[1] - lo[1]).max(1e-12);
    let (mx, my) = (0.05 * w, 0.05 * h);
    // The group flips y, so the viewBox spans −y.
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
        svg_num(lo[0] - mx),
        svg_num(-hi[1] - my),
        svg_num(w + 2.0 * mx),
        svg_num(h + 2.0 * my)
    )
    .unwrap();
    let points: Vec<String> = vertices.iter().map(|v| format!("{},{}", svg_num(v[0]), svg_num(v[1]))).collect();
    writeln!(
        svg,
        "  <g transform=\"scale(1,-1)\"><polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1px\" vector-effect=\"non-scaling-stroke\"/></g>",
        points.join(" ")
    )
    .unwrap();
    svg.push_str("</svg>\n");
    svg
}

pub fn cmd_slice(args: &SliceArgs) -> Result<i32, CliError> {
    let set = read_json::<PolytopeFile>(&args.set)?.to_hpolytope()?;
    let fixed = parse_fix(&args.fix)?;
    let sliced = set.slice(&fixed)?;
    if sliced.is_empty() {
        eprintln!("warning: the slice is empty");
    }
    write_json(&args.out, &PolytopeFile::from_hpolytope(&sliced, true))?;
    if let Some(path) = &args.svg {
        let svg = polygon_svg(&ccw_vertices(&sliced)?);
        write_atomic(path, svg.as_bytes()).map_err(io_err(path))?;
    }
    println!("{}-D slice with {} facets written to {}", sliced.dim(), sliced.num_facets(), args.out.display());
    Ok(0)
}

pub fn run(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Dp(a) => cmd_dp(a),
        Command::Check(a) => cmd_check(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Slice(a) => cmd_slice(a),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
