//! The shared run protocol: seed one generator, initialize the chosen
//! optimizer, step it a fixed number of times and record the best cost
//! seen so far after every step.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algorithms::{
    cro_init, BesParams, BesState, CroParams, EfoParams, EfoState, MvoParams, MvoState, NroParams, NroState, PsoParams,
    PsoState,
};
use crate::error::IkError;
use crate::problem::{Candidate, SearchProblem};
use crate::rng::seeded_rng;

pub const DEFAULT_POPULATION: usize = 20;
pub const DEFAULT_ITERATIONS: usize = 500;

/// A population-based optimizer that advances one iteration at a time.
pub trait Stepper {
    fn step<R: Rng + ?Sized>(&mut self, problem: &SearchProblem, iteration: usize, total: usize, rng: &mut R);

    /// Best candidate currently held by the optimizer.
    fn best(&self) -> &Candidate;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Pso,
    Cro,
    Bes,
    Efo,
    Mvo,
    Nro,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] =
        [Algorithm::Pso, Algorithm::Cro, Algorithm::Bes, Algorithm::Efo, Algorithm::Mvo, Algorithm::Nro];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Pso => "pso",
            Algorithm::Cro => "cro",
            Algorithm::Bes => "bes",
            Algorithm::Efo => "efo",
            Algorithm::Mvo => "mvo",
            Algorithm::Nro => "nro",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = IkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| IkError::UnknownAlgorithm(s.to_string()))
    }
}

/// Parameter records for every optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmParams {
    pub pso: PsoParams,
    pub cro: CroParams,
    pub bes: BesParams,
    pub efo: EfoParams,
    pub mvo: MvoParams,
    pub nro: NroParams,
}

impl AlgorithmParams {
    /// Checks the record belonging to `algorithm` against the run shape.
    pub fn validate_for(&self, algorithm: Algorithm, population: usize, iterations: usize) -> Result<(), IkError> {
        match algorithm {
            Algorithm::Pso => self.pso.validate(),
            Algorithm::Cro => self.cro.validate(population),
            Algorithm::Bes => self.bes.validate(),
            Algorithm::Efo => self.efo.validate(population),
            Algorithm::Mvo => self.mvo.validate(iterations),
            Algorithm::Nro => self.nro.validate(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub population: usize,
    pub iterations: usize,
    pub seed: u64,
    pub params: AlgorithmParams,
}

impl RunConfig {
    /// Default parameters, with the reef sized to `population` and the MVO
    /// schedule horizon set to `iterations`.
    pub fn new(population: usize, iterations: usize, seed: u64) -> Self {
        let mut params = AlgorithmParams::default();
        params.cro.reef_rows = 1;
        params.cro.reef_cols = population;
        params.mvo.max_iterations = iterations;
        Self { population, iterations, seed, params }
    }

    pub fn with_seed(seed: u64) -> Self {
        Self::new(DEFAULT_POPULATION, DEFAULT_ITERATIONS, seed)
    }

    pub fn validate(&self, algorithm: Algorithm) -> Result<(), IkError> {
        if self.population < 2 {
            return Err(IkError::Config(format!("population must be at least 2, got {}", self.population)));
        }
        if self.iterations < 1 {
            return Err(IkError::Config("iterations must be at least 1".into()));
        }
        self.params.validate_for(algorithm, self.population, self.iterations)
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::with_seed(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    /// Best cost seen so far, recorded after each iteration.
    pub best_cost_per_iteration: Vec<f64>,
    pub final_best: Candidate,
    /// Seconds spent in the iteration loop.
    pub wall_time: f64,
}

impl ConvergenceTrace {
    pub fn final_cost(&self) -> f64 {
        self.final_best.cost
    }

    pub fn is_monotone(&self) -> bool {
        self.best_cost_per_iteration.windows(2).all(|w| w[1] <= w[0])
    }
}

fn drive<S: Stepper>(
    mut state: S,
    problem: &SearchProblem,
    iterations: usize,
    rng: &mut crate::rng::RunRng,
) -> ConvergenceTrace {
    let mut elite = state.best().clone();
    let mut history = Vec::with_capacity(iterations);
    let start = Instant::now();
    for t in 0..iterations {
        state.step(problem, t, iterations, rng);
        if state.best().cost < elite.cost {
            elite = state.best().clone();
        }
        history.push(elite.cost);
    }
    let wall_time = start.elapsed().as_secs_f64();
    ConvergenceTrace { best_cost_per_iteration: history, final_best: elite, wall_time }
}

/// Runs `algorithm` on `problem`. The result depends only on the problem,
/// the configuration and the algorithm (apart from `wall_time`).
pub fn run(problem: &SearchProblem, config: &RunConfig, algorithm: Algorithm) -> Result<ConvergenceTrace, IkError> {
    config.validate(algorithm)?;
    let mut rng = seeded_rng(config.seed);
    let n = config.population;
    let p = &config.params;
    let iters = config.iterations;
    let trace = match algorithm {
        Algorithm::Pso => drive(PsoState::init(problem, p.pso, n, &mut rng), problem, iters, &mut rng),
        Algorithm::Cro => drive(cro_init(problem, p.cro, &mut rng), problem, iters, &mut rng),
        Algorithm::Bes => drive(BesState::init(problem, p.bes, n, &mut rng), problem, iters, &mut rng),
        Algorithm::Efo => drive(EfoState::init(problem, p.efo, n, &mut rng), problem, iters, &mut rng),
        Algorithm::Mvo => drive(MvoState::init(problem, p.mvo, n, &mut rng), problem, iters, &mut rng),
        Algorithm::Nro => drive(NroState::init(problem, p.nro, n, &mut rng), problem, iters, &mut rng),
    };
    Ok(trace)
}
