//! Experiment harness: (algorithm × target × seed) sweeps, aggregation into
//! a per-target error table, and the CSV/JSON writers used by the CLI.
//!
//! Runs are independent, so with the `parallel` feature they are spread
//! over a rayon pool. Results are always gathered in configuration order,
//! which keeps every deterministic output byte-identical regardless of the
//! worker count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algorithms::{BesParams, CroParams, EfoParams, MvoParams, NroParams, PsoParams};
use crate::error::IkError;
use crate::kinematics::{forward_kinematics, objective, DhRow, JointConfig, Position, RobotModel, DOF};
use crate::problem::make_ik_problem;
use crate::rng::seeded_rng;
use crate::runner::{run, Algorithm, AlgorithmParams, RunConfig, DEFAULT_ITERATIONS, DEFAULT_POPULATION};

/// Seeds used when a configuration does not list its own.
pub const DEFAULT_SEEDS: [u64; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

/// Formats a value in scientific notation with six significant digits.
pub fn sci(v: f64) -> String {
    format!("{v:.5e}")
}

/// A DH row as written in configuration files: lengths in cm, angles in
/// degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DhRowDegrees {
    pub a: f64,
    pub alpha: f64,
    pub d: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl DhRowDegrees {
    fn to_row(self) -> Result<DhRow, IkError> {
        DhRow::new(self.a, self.alpha.to_radians(), self.d, self.theta_min.to_radians(), self.theta_max.to_radians())
    }
}

fn model_from(rows: Option<&[DhRowDegrees]>) -> Result<RobotModel, IkError> {
    match rows {
        None => Ok(RobotModel::default()),
        Some(rows) => {
            let rows = rows.iter().map(|r| r.to_row()).collect::<Result<Vec<_>, _>>()?;
            RobotModel::new(rows).map_err(|e| IkError::Config(format!("model: {e}")))
        }
    }
}

fn default_population() -> usize {
    DEFAULT_POPULATION
}

fn default_iterations() -> usize {
    DEFAULT_ITERATIONS
}

fn default_seeds() -> Vec<u64> {
    DEFAULT_SEEDS.to_vec()
}

/// Benchmark configuration file (JSON).
///
/// ```json
/// {
///   "algorithms": ["bes", "pso"],
///   "targets": [[1, 1, 7], [0.42, -0.11, 8.75]],
///   "seeds": [1, 2, 3],
///   "population": 20,
///   "iterations": 500,
///   "bes": { "a_corner": 10 },
///   "output": "results/run1"
/// }
/// ```
///
/// Only `algorithms` and `targets` are required. Per-algorithm records
/// (`pso`, `cro`, `bes`, `efo`, `mvo`, `nro`) override individual
/// parameters. `model` replaces the built-in DH table (degrees).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub targets: Vec<[f64; 3]>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_population")]
    pub population: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pso: Option<PsoParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cro: Option<CroParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bes: Option<BesParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub efo: Option<EfoParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mvo: Option<MvoParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nro: Option<NroParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Vec<DhRowDegrees>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl BenchConfig {
    pub fn new(algorithms: Vec<Algorithm>, targets: Vec<Position>, seeds: Vec<u64>) -> Self {
        Self {
            algorithms,
            targets: targets.into_iter().map(Position::to_array).collect(),
            seeds,
            population: DEFAULT_POPULATION,
            iterations: DEFAULT_ITERATIONS,
            pso: None,
            cro: None,
            bes: None,
            efo: None,
            mvo: None,
            nro: None,
            model: None,
            output: None,
            workers: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, IkError> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, IkError> {
        let text = fs::read_to_string(path)
            .map_err(|e| IkError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn positions(&self) -> Vec<Position> {
        self.targets.iter().map(|t| Position::new(t[0], t[1], t[2])).collect()
    }

    pub fn robot_model(&self) -> Result<RobotModel, IkError> {
        model_from(self.model.as_deref())
    }

    /// Parameter records with overrides applied. Without an explicit `cro`
    /// record the reef is 1 × population; without an explicit `mvo` record
    /// the schedule horizon is the iteration count.
    pub fn algorithm_params(&self) -> AlgorithmParams {
        let defaults = RunConfig::new(self.population, self.iterations, 0).params;
        AlgorithmParams {
            pso: self.pso.unwrap_or(defaults.pso),
            cro: self.cro.unwrap_or(defaults.cro),
            bes: self.bes.unwrap_or(defaults.bes),
            efo: self.efo.unwrap_or(defaults.efo),
            mvo: self.mvo.unwrap_or(defaults.mvo),
            nro: self.nro.unwrap_or(defaults.nro),
        }
    }

    pub fn run_config(&self, seed: u64) -> RunConfig {
        RunConfig { population: self.population, iterations: self.iterations, seed, params: self.algorithm_params() }
    }

    pub fn validate(&self) -> Result<(), IkError> {
        if self.algorithms.is_empty() {
            return Err(IkError::Config("algorithms: list must not be empty".into()));
        }
        if self.targets.is_empty() {
            return Err(IkError::Config("targets: list must not be empty".into()));
        }
        if self.seeds.is_empty() {
            return Err(IkError::Config("seeds: list must not be empty".into()));
        }
        if self.population < 2 {
            return Err(IkError::Config(format!("population: must be at least 2, got {}", self.population)));
        }
        if self.iterations < 1 {
            return Err(IkError::Config("iterations: must be at least 1".into()));
        }
        if let Some(i) = self.targets.iter().position(|t| t.iter().any(|v| !v.is_finite())) {
            return Err(IkError::Config(format!("targets[{i}]: coordinates must be finite")));
        }
        if self.workers == Some(0) {
            return Err(IkError::Config("workers: must be at least 1".into()));
        }
        self.robot_model()?;
        let params = self.algorithm_params();
        for &a in &self.algorithms {
            params.validate_for(a, self.population, self.iterations)?;
        }
        Ok(())
    }
}

/// Overrides accepted by single-run commands: run shape, per-algorithm
/// parameters and the DH model. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    pub population: Option<usize>,
    pub iterations: Option<usize>,
    pub pso: Option<PsoParams>,
    pub cro: Option<CroParams>,
    pub bes: Option<BesParams>,
    pub efo: Option<EfoParams>,
    pub mvo: Option<MvoParams>,
    pub nro: Option<NroParams>,
    pub model: Option<Vec<DhRowDegrees>>,
}

impl ParamFile {
    pub fn load(path: &Path) -> Result<Self, IkError> {
        let text = fs::read_to_string(path)
            .map_err(|e| IkError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn robot_model(&self) -> Result<RobotModel, IkError> {
        model_from(self.model.as_deref())
    }

    /// A one-run bench configuration carrying these overrides.
    pub fn single_run(&self, algorithm: Algorithm, target: Position, seed: u64) -> BenchConfig {
        let mut c = BenchConfig::new(vec![algorithm], vec![target], vec![seed]);
        c.population = self.population.unwrap_or(DEFAULT_POPULATION);
        c.iterations = self.iterations.unwrap_or(DEFAULT_ITERATIONS);
        c.pso = self.pso;
        c.cro = self.cro;
        c.bes = self.bes;
        c.efo = self.efo;
        c.mvo = self.mvo;
        c.nro = self.nro;
        c.model = self.model.clone();
        c
    }
}

/// Outcome of one (algorithm, target, seed) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub algorithm: Algorithm,
    pub target: [f64; 3],
    pub seed: u64,
    /// Positional error re-evaluated from `final_angles_rad`, in cm.
    pub final_error: f64,
    pub final_angles_deg: [f64; DOF],
    pub final_angles_rad: [f64; DOF],
    pub wall_time: f64,
    #[serde(skip)]
    pub trace: Vec<f64>,
}

impl SolveRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }
}

/// Runs one solve and re-evaluates the reported configuration.
pub fn solve(
    model: &RobotModel,
    target: Position,
    algorithm: Algorithm,
    config: &RunConfig,
) -> Result<SolveRecord, IkError> {
    let problem = make_ik_problem(model, target)?;
    let trace = run(&problem, config, algorithm)?;
    let q = JointConfig::from_slice(&trace.final_best.position)?;
    Ok(SolveRecord {
        algorithm,
        target: target.to_array(),
        seed: config.seed,
        final_error: objective(model, &target, &q),
        final_angles_deg: q.to_degrees(),
        final_angles_rad: q.theta,
        wall_time: trace.wall_time,
        trace: trace.best_cost_per_iteration,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmAggregate {
    pub algorithm: Algorithm,
    pub mean_error: f64,
    pub median_error: f64,
    pub mean_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub population: usize,
    pub iterations: usize,
    pub records: Vec<SolveRecord>,
    pub aggregates: Vec<AlgorithmAggregate>,
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Median; the mean of the two middle values for even lengths.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

impl BenchReport {
    fn from_records(population: usize, iterations: usize, algorithms: &[Algorithm], records: Vec<SolveRecord>) -> Self {
        let aggregates = algorithms
            .iter()
            .map(|&a| {
                let errors: Vec<f64> = records.iter().filter(|r| r.algorithm == a).map(|r| r.final_error).collect();
                let times: Vec<f64> = records.iter().filter(|r| r.algorithm == a).map(|r| r.wall_time).collect();
                AlgorithmAggregate {
                    algorithm: a,
                    mean_error: mean(&errors),
                    median_error: median(&errors),
                    mean_time: mean(&times),
                }
            })
            .collect();
        Self { population, iterations, records, aggregates }
    }

    pub fn algorithms(&self) -> Vec<Algorithm> {
        self.aggregates.iter().map(|a| a.algorithm).collect()
    }

    pub fn aggregate(&self, algorithm: Algorithm) -> Option<&AlgorithmAggregate> {
        self.aggregates.iter().find(|a| a.algorithm == algorithm)
    }

    fn targets(&self) -> Vec<[f64; 3]> {
        let mut out: Vec<[f64; 3]> = Vec::new();
        for r in &self.records {
            if !out.contains(&r.target) {
                out.push(r.target);
            }
        }
        out
    }

    /// One row per record. Deterministic: contains no timings.
    pub fn records_csv(&self) -> String {
        let mut out = String::from("algorithm,target_x,target_y,target_z,seed,final_error");
        for i in 1..=DOF {
            let _ = write!(out, ",theta{i}_deg");
        }
        out.push('\n');
        for r in &self.records {
            let _ = write!(
                out,
                "{},{},{},{},{},{}",
                r.algorithm,
                sci(r.target[0]),
                sci(r.target[1]),
                sci(r.target[2]),
                r.seed,
                sci(r.final_error)
            );
            for a in r.final_angles_deg {
                let _ = write!(out, ",{}", sci(a));
            }
            out.push('\n');
        }
        out
    }

    /// Mean error over seeds per target (rows) and algorithm (columns),
    /// followed by average and median error footer rows. Deterministic.
    pub fn summary_csv(&self) -> String {
        let algorithms = self.algorithms();
        let mut out = String::from("x,y,z");
        for a in &algorithms {
            let _ = write!(out, ",{a}");
        }
        out.push('\n');
        for t in self.targets() {
            let _ = write!(out, "{},{},{}", sci(t[0]), sci(t[1]), sci(t[2]));
            for &a in &algorithms {
                let errors: Vec<f64> =
                    self.records.iter().filter(|r| r.algorithm == a && r.target == t).map(|r| r.final_error).collect();
                let _ = write!(out, ",{}", sci(mean(&errors)));
            }
            out.push('\n');
        }
        for (label, pick) in [
            ("Average Error", (|a: &AlgorithmAggregate| a.mean_error) as fn(&AlgorithmAggregate) -> f64),
            ("Median Error", |a: &AlgorithmAggregate| a.median_error),
        ] {
            out.push_str(label);
            out.push_str(",,");
            for agg in &self.aggregates {
                let _ = write!(out, ",{}", sci(pick(agg)));
            }
            out.push('\n');
        }
        out
    }

    /// Mean wall time per algorithm. Varies from run to run.
    pub fn timing_csv(&self) -> String {
        let mut out = String::from("algorithm,runs,mean_time_s\n");
        for agg in &self.aggregates {
            let runs = self.records.iter().filter(|r| r.algorithm == agg.algorithm).count();
            let _ = writeln!(out, "{},{},{}", agg.algorithm, runs, sci(agg.mean_time));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes `records.csv`, `summary.csv`, `timing.csv` and `report.json`
    /// into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<(), IkError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("records.csv"), self.records_csv())?;
        fs::write(dir.join("summary.csv"), self.summary_csv())?;
        fs::write(dir.join("timing.csv"), self.timing_csv())?;
        fs::write(dir.join("report.json"), self.to_json())?;
        Ok(())
    }
}

struct Job {
    algorithm: Algorithm,
    target: Position,
    seed: u64,
}

fn jobs(config: &BenchConfig) -> Vec<Job> {
    let mut out = Vec::new();
    for &algorithm in &config.algorithms {
        for target in config.positions() {
            for &seed in &config.seeds {
                out.push(Job { algorithm, target, seed });
            }
        }
    }
    out
}

#[cfg(feature = "parallel")]
fn execute(
    jobs: &[Job],
    workers: usize,
    work: impl Fn(&Job) -> Result<SolveRecord, IkError> + Sync,
) -> Result<Vec<SolveRecord>, IkError> {
    use rayon::prelude::*;
    if workers <= 1 {
        return jobs.iter().map(work).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| IkError::Config(format!("workers: cannot start thread pool: {e}")))?;
    pool.install(|| jobs.par_iter().map(&work).collect())
}

#[cfg(not(feature = "parallel"))]
fn execute(
    jobs: &[Job],
    _workers: usize,
    work: impl Fn(&Job) -> Result<SolveRecord, IkError>,
) -> Result<Vec<SolveRecord>, IkError> {
    jobs.iter().map(work).collect()
}

/// Runs every (algorithm × target × seed) combination on up to `workers`
/// threads. Records come back in configuration order.
pub fn run_bench(config: &BenchConfig, workers: usize) -> Result<BenchReport, IkError> {
    config.validate()?;
    let model = config.robot_model()?;
    let jobs = jobs(config);
    let records =
        execute(&jobs, workers.max(1), |job| solve(&model, job.target, job.algorithm, &config.run_config(job.seed)))?;
    Ok(BenchReport::from_records(config.population, config.iterations, &config.algorithms, records))
}

/// `iteration,best_error` rows, one per iteration (1-based).
pub fn trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("iteration,best_error\n");
    for (i, e) in trace.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, sci(*e));
    }
    out
}

/// End-effector positions of `count` uniformly drawn feasible
/// configurations; every point is reachable by construction.
pub fn sample_points(model: &RobotModel, count: usize, seed: u64) -> Vec<Position> {
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            let mut theta = [0.0; DOF];
            for (t, row) in theta.iter_mut().zip(model.rows()) {
                *t = rng.random_range(row.theta_min..=row.theta_max);
            }
            forward_kinematics(model, &JointConfig::new(theta))
        })
        .collect()
}

pub fn points_csv(points: &[Position]) -> String {
    let mut out = String::from("x,y,z\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", sci(p.x), sci(p.y), sci(p.z));
    }
    out
}

/// Warning text when `target` lies outside the reach sphere around the
/// shoulder.
pub fn reach_warning(model: &RobotModel, target: &Position) -> Option<String> {
    let distance = crate::kinematics::fitness(target, &model.shoulder());
    (distance > model.reach()).then(|| {
        format!(
            "target ({}, {}, {}) is {:.3} cm from the shoulder, beyond the {:.3} cm reach; \
             the optimizer will converge towards the closest reachable point",
            target.x,
            target.y,
            target.z,
            distance,
            model.reach()
        )
    })
}
