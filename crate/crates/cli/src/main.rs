//! `ik9`: solve, benchmark and inspect inverse kinematics of the 9-DOF arm.
//!
//! Exit status is 0 on success, 2 on usage or configuration errors and 1
//! when writing output fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ik_core::bench::{self, BenchConfig, ParamFile, SolveRecord};
use ik_core::{forward_kinematics, Algorithm, IkError, JointConfig, Position, DOF};

#[derive(Parser)]
#[command(name = "ik9", version, about = "Metaheuristic inverse kinematics for a 9-DOF arm")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one target and print the final error and joint angles.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Write the solve record as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every (algorithm, target, seed) combination of a config file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: config `workers`, else all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Per-iteration best error of one run, as CSV.
    Trace {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forward kinematics of nine joint angles given in degrees.
    Fk {
        #[arg(num_args = 1.., allow_negative_numbers = true, value_name = "DEG")]
        angles: Vec<f64>,
        /// JSON file with a `model` override.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// End-effector positions of uniformly drawn feasible configurations.
    SamplePoints {
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Target position in cm, as x,y,z.
    #[arg(long, value_parser = parse_target, allow_hyphen_values = true)]
    target: Position,
    #[arg(long, value_parser = parse_algorithm)]
    alg: Algorithm,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    iters: Option<usize>,
    /// JSON file with parameter overrides.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_target(s: &str) -> Result<Position, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z but got {} component(s)", parts.len()));
    }
    let mut v = [0.0; 3];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part.parse::<f64>().map_err(|e| format!("`{part}`: {e}"))?;
        if !slot.is_finite() {
            return Err(format!("`{part}` is not finite"));
        }
    }
    Ok(Position::new(v[0], v[1], v[2]))
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: IkError| e.to_string())
}

enum Failure {
    Usage(String),
    Output(String),
}

impl From<IkError> for Failure {
    fn from(e: IkError) -> Self {
        match e {
            IkError::Io(_) => Failure::Output(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Output(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure::Output(format!("{}: {e}", path.display())))
}

fn param_file(path: Option<&Path>) -> Result<ParamFile, Failure> {
    Ok(match path {
        Some(p) => ParamFile::load(p)?,
        None => ParamFile::default(),
    })
}

fn single_run(run: &RunArgs) -> Result<(BenchConfig, SolveRecord), Failure> {
    let mut params = param_file(run.config.as_deref())?;
    if run.pop.is_some() {
        params.population = run.pop;
    }
    if run.iters.is_some() {
        params.iterations = run.iters;
    }
    let config = params.single_run(run.alg, run.target, run.seed);
    config.validate()?;
    let model = config.robot_model()?;
    if let Some(w) = bench::reach_warning(&model, &run.target) {
        eprintln!("warning: {w}");
    }
    let record = bench::solve(&model, run.target, run.alg, &config.run_config(run.seed))?;
    Ok((config, record))
}

fn cmd_solve(run: RunArgs, out: Option<PathBuf>) -> Result<(), Failure> {
    let (config, r) = single_run(&run)?;
    println!("algorithm   {}", r.algorithm);
    println!("target      ({}, {}, {})", r.target[0], r.target[1], r.target[2]);
    println!("seed        {}", r.seed);
    println!("population  {}  iterations {}", config.population, config.iterations);
    println!("error_cm    {}", bench::sci(r.final_error));
    let angles: Vec<String> = r.final_angles_deg.iter().map(|a| format!("{a:.6}")).collect();
    println!("angles_deg  {}", angles.join(" "));
    println!("wall_time_s {}", bench::sci(r.wall_time));
    if let Some(path) = out {
        write_file(&path, &r.to_json())?;
    }
    Ok(())
}

fn cmd_bench(config: PathBuf, out: Option<PathBuf>, workers: Option<usize>) -> Result<(), Failure> {
    let config = BenchConfig::load(&config)?;
    if workers == Some(0) {
        return Err(Failure::Usage("--workers must be at least 1".into()));
    }
    let workers =
        workers.or(config.workers).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let model = config.robot_model()?;
    for t in config.positions() {
        if let Some(w) = bench::reach_warning(&model, &t) {
            eprintln!("warning: {w}");
        }
    }
    let report = bench::run_bench(&config, workers)?;
    print!("{}", report.summary_csv());
    if let Some(dir) = out.or(config.output.clone()) {
        report.write_to(&dir)?;
        eprintln!("wrote {}", dir.display());
    }
    Ok(())
}

fn cmd_trace(run: RunArgs, out: Option<PathBuf>) -> Result<(), Failure> {
    let (_, r) = single_run(&run)?;
    let csv = bench::trace_csv(&r.trace);
    match out {
        Some(path) => write_file(&path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn cmd_fk(angles: Vec<f64>, config: Option<PathBuf>) -> Result<(), Failure> {
    if angles.len() != DOF {
        return Err(Failure::Usage(format!("fk expects {DOF} angles in degrees, got {}", angles.len())));
    }
    if angles.iter().any(|a| !a.is_finite()) {
        return Err(Failure::Usage("fk angles must be finite".into()));
    }
    let model = param_file(config.as_deref())?.robot_model()?;
    let q = JointConfig::from_degrees(&angles)?;
    if !q.is_feasible(&model) {
        eprintln!("warning: configuration lies outside the joint limits");
    }
    let p = forward_kinematics(&model, &q);
    println!("{} {} {}", p.x, p.y, p.z);
    Ok(())
}

fn cmd_sample_points(count: u64, seed: u64, config: Option<PathBuf>, out: Option<PathBuf>) -> Result<(), Failure> {
    let model = param_file(config.as_deref())?.robot_model()?;
    let csv = bench::points_csv(&bench::sample_points(&model, count as usize, seed));
    match out {
        Some(path) => write_file(&path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { run, out } => cmd_solve(run, out),
        Command::Bench { config, out, workers } => cmd_bench(config, out, workers),
        Command::Trace { run, out } => cmd_trace(run, out),
        Command::Fk { angles, config } => cmd_fk(angles, config),
        Command::SamplePoints { count, seed, config, out } => cmd_sample_points(count, seed, config, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Output(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
