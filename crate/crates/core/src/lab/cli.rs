//! Command-line front end. Exit codes: 0 when every verdict passes, 1 when a
//! run fails or a verdict is red, 2 on usage errors.

use std::ffi::OsString;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use super::acceptance::{default_config, run_all, run_criterion, CriterionOutcome, CRITERIA};
use super::config::{ExperimentConfig, GridSpec, InitialData};
use super::experiments::{run_experiment, EXPERIMENTS};
use crate::error::Error;
use crate::functionals::{decay_monitor, system_series, MonitorParams};
use crate::model::lookup;
use crate::riemann::{shocks, solve_riemann, RiemannParams};
use crate::viscous::{solve, SolveConfig, Trajectory};
use crate::waves::{decompose_field, DecompParams};

#[derive(Debug, Parser)]
#[command(name = "vanvisc", version, about = "Viscous solver, wave decomposition, Riemann fans and experiment checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the viscous system and write the snapshots.
    Solve(ProblemArgs),
    /// Solve a Riemann problem and write the wave curves and the fan.
    Riemann(RiemannArgs),
    /// Decompose one snapshot into travelling-wave components.
    Decompose(DecomposeArgs),
    /// Evaluate the decay functionals along a run.
    Functionals(FunctionalsArgs),
    /// Run an acceptance criterion (1-18), an experiment, or `all`.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// TOML experiment config; overrides the inline problem flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "burgers")]
    model: String,
    /// Left state, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1")]
    ul: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0")]
    ur: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// Final time.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    b: f64,
    /// Cell size; defaults to eps/4.
    #[arg(long)]
    dx: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RiemannArgs {
    #[arg(long)]
    model: String,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    ul: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    ur: Vec<f64>,
    /// Time at which the profile `x, u(t, x)` is sampled.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Nodes per wave curve.
    #[arg(long, default_value_t = 400)]
    m: usize,
    #[arg(long, default_value = "fan.csv")]
    out: PathBuf,
    /// Profile window half-width in x.
    #[arg(long, default_value_t = 2.0)]
    half_width: f64,
    #[arg(long, default_value_t = 801)]
    points: usize,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Snapshot time; defaults to the final time.
    #[arg(long)]
    time: Option<f64>,
}

#[derive(Debug, Args)]
struct FunctionalsArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Number of snapshot intervals.
    #[arg(long, default_value_t = 100)]
    snapshots: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// `all`, a criterion number, or an experiment name.
    target: String,
    /// Trim sample counts the criteria leave open.
    #[arg(long)]
    quick: bool,
    /// Experiment config (TOML); only for experiment targets.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "verify_out")]
    out: PathBuf,
}

#[derive(Debug, Serialize)]
struct Manifest {
    command: String,
    version: &'static str,
    args: Vec<String>,
    config: Option<String>,
    config_hash: Option<String>,
    seed: Option<u64>,
    wall_seconds: f64,
    passed: bool,
    outputs: Vec<String>,
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownModel(_) | Error::InvalidInput(_) => Failure::Usage(e.to_string()),
            e => Failure::Run(e),
        }
    }
}

/// Outcome of a subcommand: pass flag, output files, and the config echo.
struct Outcome {
    passed: bool,
    outputs: Vec<PathBuf>,
    config: Option<ExperimentConfig>,
    /// Where the manifest goes when it differs from `--out`.
    dir: Option<PathBuf>,
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let start = Instant::now();
    let (name, manifest_dir) = match &cli.command {
        Command::Solve(p) => ("solve", p.out.clone()),
        Command::Riemann(r) => ("riemann", r.out.parent().map(Path::to_path_buf).unwrap_or_default()),
        Command::Decompose(d) => ("decompose", d.problem.out.clone()),
        Command::Functionals(f) => ("functionals", f.problem.out.clone()),
        Command::Verify(v) => ("verify", v.out.clone()),
    };
    let res = match cli.command {
        Command::Solve(p) => cmd_solve(&p),
        Command::Riemann(r) => cmd_riemann(&r),
        Command::Decompose(d) => cmd_decompose(&d),
        Command::Functionals(f) => cmd_functionals(&f),
        Command::Verify(v) => cmd_verify(&v),
    };
    match res {
        Ok(out) => {
            let manifest = Manifest {
                command: name.into(),
                version: env!("CARGO_PKG_VERSION"),
                args: argv.iter().map(|a| a.to_string_lossy().into_owned()).collect(),
                config: out.config.as_ref().map(ExperimentConfig::to_toml),
                config_hash: out.config.as_ref().map(ExperimentConfig::hash),
                seed: out.config.as_ref().map(|c| c.seed),
                wall_seconds: start.elapsed().as_secs_f64(),
                passed: out.passed,
                outputs: out.outputs.iter().map(|p| p.display().to_string()).collect(),
            };
            if let Err(e) = write_manifest(out.dir.as_deref().unwrap_or(&manifest_dir), &manifest) {
                eprintln!("error: {e}");
                return 1;
            }
            if out.passed {
                0
            } else {
                1
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn write_manifest(dir: &Path, m: &Manifest) -> Result<(), Error> {
    if !dir.as_os_str().is_empty() {
        std::fs::create_dir_all(dir)?;
    }
    let f = File::create(dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(f, m).map_err(|e| Error::Io(e.to_string()))
}

impl ProblemArgs {
    fn config(&self, name: &str) -> Result<ExperimentConfig, Failure> {
        if let Some(path) = &self.config {
            return ExperimentConfig::load(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())));
        }
        let grid = GridSpec { a: self.a, b: self.b, dx: self.dx, dx_over_eps: 0.25 };
        let cfg = ExperimentConfig::new(name, &self.model, InitialData::riemann(self.ul.clone(), self.ur.clone()), vec![self.eps], grid)
            .with_times(vec![self.t]);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn final_time(cfg: &ExperimentConfig) -> f64 {
    cfg.times.last().copied().unwrap_or(1.0)
}

fn run_config(cfg: &ExperimentConfig, solve_cfg: SolveConfig) -> Result<Trajectory, Failure> {
    let model = cfg.model()?;
    let grid = cfg.grid.grid(cfg.eps[0])?;
    Ok(solve(&model, &cfg.initial.field(grid), &solve_cfg)?)
}

fn create(dir: &Path, file: &str) -> Result<(File, PathBuf), Failure> {
    std::fs::create_dir_all(dir).map_err(Error::from)?;
    let p = dir.join(file);
    Ok((File::create(&p).map_err(Error::from)?, p))
}

fn cmd_solve(p: &ProblemArgs) -> Result<Outcome, Failure> {
    let cfg = p.config("solve")?;
    let times = if cfg.times.is_empty() { vec![1.0] } else { cfg.times.clone() };
    let traj = run_config(&cfg, SolveConfig::new(cfg.eps[0], final_time(&cfg)).with_snapshots(times))?;
    let (f, path) = create(&p.out, "solution.csv")?;
    traj.write_csv(f)?;
    println!("wrote {} snapshots to {}", traj.snapshots.len(), path.display());
    Ok(Outcome { passed: true, outputs: vec![path], config: Some(cfg), dir: None })
}

fn cmd_riemann(r: &RiemannArgs) -> Result<Outcome, Failure> {
    let model = lookup(&r.model)?;
    if r.ul.len() != model.n || r.ur.len() != model.n {
        return Err(Failure::Usage(format!("{} needs {} components per state", model.name, model.n)));
    }
    if !(r.t > 0.0) || r.points < 2 {
        return Err(Failure::Usage("need t > 0 and at least two profile points".into()));
    }
    let mut params = RiemannParams::for_model(&model);
    params.m = r.m;
    let fan = solve_riemann(&model, &r.ul, &r.ur, &params)?;
    if let Some(dir) = r.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(Error::from)?;
    }
    fan.write_curves_csv(File::create(&r.out).map_err(Error::from)?)?;
    let stem = r.out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "fan".into());
    let profile = r.out.with_file_name(format!("{stem}_profile.csv"));
    let mut wr = csv::Writer::from_writer(File::create(&profile).map_err(Error::from)?);
    let mut header = vec!["x".to_string()];
    header.extend((1..=model.n).map(|k| format!("u{k}")));
    wr.write_record(&header).map_err(Error::from)?;
    for k in 0..r.points {
        let x = -r.half_width + 2.0 * r.half_width * k as f64 / (r.points - 1) as f64;
        let mut rec = vec![x.to_string()];
        rec.extend(fan.sample(x / r.t).iter().map(|v| v.to_string()));
        wr.write_record(&rec).map_err(Error::from)?;
    }
    wr.flush().map_err(Error::from)?;
    for (i, s) in fan.strengths.iter().enumerate() {
        println!("family {}: strength {s:.6e}, speeds [{:.6}, {:.6}]", i + 1, fan.speed_ranges[i].0, fan.speed_ranges[i].1);
    }
    for s in shocks(&fan) {
        println!("shock in family {}: sigma = {:.8}, {:?} -> {:?}", s.family + 1, s.sigma, s.u_minus, s.u_plus);
    }
    Ok(Outcome { passed: true, outputs: vec![r.out.clone(), profile], config: None, dir: None })
}

fn cmd_decompose(d: &DecomposeArgs) -> Result<Outcome, Failure> {
    let cfg = d.problem.config("decompose")?;
    let t = d.time.unwrap_or_else(|| final_time(&cfg));
    let traj = run_config(&cfg, SolveConfig::new(cfg.eps[0], t))?;
    let model = cfg.model()?;
    let dec = decompose_field(&model, traj.last(), cfg.eps[0], &DecompParams::default())?;
    let (f, path) = create(&d.problem.out, "decomposition.csv")?;
    dec.write_csv(f)?;
    println!("decomposed t = {t} into {} families: {}", model.n, path.display());
    Ok(Outcome { passed: true, outputs: vec![path], config: Some(cfg), dir: None })
}

fn cmd_functionals(fa: &FunctionalsArgs) -> Result<Outcome, Failure> {
    let cfg = fa.problem.config("functionals")?;
    let count = cfg.params.get("snapshots").map_or(fa.snapshots, |v| *v as usize).max(2);
    let eps = cfg.eps[0];
    let traj = run_config(&cfg, SolveConfig::new(eps, final_time(&cfg)).with_uniform_snapshots(0.0, count))?;
    let model = cfg.model()?;
    let series = system_series(&model, &traj, eps)?;
    let mon = decay_monitor(&series, &MonitorParams::default());
    let (f, path) = create(&fa.problem.out, "functionals.csv")?;
    series.write_csv(f)?;
    println!(
        "{}: Q margin {:.3e}, A margin {:.3e}, L margin {:.3e}, {} flagged intervals",
        if mon.passed { "PASS" } else { "FAIL" },
        mon.q_margin,
        mon.a_margin,
        mon.l_margin,
        mon.flagged
    );
    Ok(Outcome { passed: mon.passed, outputs: vec![path], config: Some(cfg), dir: None })
}

fn write_outcomes(dir: &Path, outs: &[CriterionOutcome]) -> Result<PathBuf, Failure> {
    let (f, path) = create(dir, "acceptance.csv")?;
    let mut wr = csv::Writer::from_writer(f);
    wr.write_record(["criterion", "title", "passed", "seconds", "detail"]).map_err(Error::from)?;
    for o in outs {
        let detail = match &o.error {
            Some(e) => e.clone(),
            None => o.verdicts.iter().map(|v| v.line()).collect::<Vec<_>>().join("; "),
        };
        wr.write_record([o.id.to_string(), o.title.to_string(), o.passed.to_string(), format!("{:.3}", o.seconds), detail])
            .map_err(Error::from)?;
    }
    wr.flush().map_err(Error::from)?;
    Ok(path)
}

fn cmd_verify(v: &VerifyArgs) -> Result<Outcome, Failure> {
    let target = v.target.as_str();
    if target == "all" || target.parse::<usize>().is_ok() {
        if v.config.is_some() {
            return Err(Failure::Usage("--config applies to experiment targets only".into()));
        }
        let outs = if target == "all" {
            run_all(v.quick)
        } else {
            let id: usize = target.parse().unwrap();
            if !CRITERIA.iter().any(|c| c.id == id) {
                return Err(Failure::Usage(format!("no criterion {id}; expected 1-{}", CRITERIA.len())));
            }
            vec![run_criterion(id, v.quick)]
        };
        for o in &outs {
            println!("{}", o.line());
        }
        let passed = outs.iter().all(|o| o.passed);
        println!("{}/{} criteria passed", outs.iter().filter(|o| o.passed).count(), outs.len());
        let path = write_outcomes(&v.out, &outs)?;
        return Ok(Outcome { passed, outputs: vec![path], config: None, dir: None });
    }
    if !EXPERIMENTS.contains(&target) {
        return Err(Failure::Usage(format!("unknown target '{target}'; expected all, 1-18, or one of {}", EXPERIMENTS.join(", "))));
    }
    let cfg = match &v.config {
        Some(path) => {
            let c = ExperimentConfig::load(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            if c.name != target {
                return Err(Failure::Usage(format!("config is for '{}', not '{target}'", c.name)));
            }
            c
        }
        None => default_config(target, v.quick).expect("every experiment has a default config"),
    };
    let report = run_experiment(&cfg)?;
    for verdict in &report.verdicts {
        println!("{}", verdict.line());
    }
    for n in &report.notes {
        println!("note: {n}");
    }
    let dir = cfg.output.clone().unwrap_or_else(|| v.out.clone());
    report.write(&dir)?;
    let outputs = vec![dir.join(format!("{target}.csv")), dir.join(format!("{target}_verdicts.csv"))];
    Ok(Outcome { passed: report.passed(), outputs, config: Some(cfg), dir: Some(dir) })
}
