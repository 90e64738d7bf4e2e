//! Electromagnetic field optimization.
//!
//! The population is kept sorted by cost and split into a positive field
//! (best), a negative field (worst) and a neutral field in between. Each
//! generation builds one new particle whose coordinates are attracted to
//! positive donors and repelled from negative donors with a golden-ratio
//! weighting, and swaps it in for the worst particle if it is better.

use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::IkError;
use crate::problem::{Candidate, SearchProblem};
use crate::runner::Stepper;

pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EfoParams {
    /// Probability of copying a coordinate straight from a positive donor.
    pub ps_rate: f64,
    /// Probability of re-drawing one random coordinate uniformly.
    pub r_rate: f64,
    pub p_field: f64,
    pub n_field: f64,
    /// Particles generated per optimizer iteration.
    pub generations_per_step: usize,
}

impl Default for EfoParams {
    fn default() -> Self {
        Self {
            // Published as "10"; only meaningful as a probability.
            ps_rate: 0.1,
            r_rate: 0.3,
            p_field: 0.1,
            n_field: 0.45,
            generations_per_step: 1,
        }
    }
}

impl EfoParams {
    pub fn validate(&self, population: usize) -> Result<(), IkError> {
        for (key, v) in [
            ("efo.ps_rate", self.ps_rate),
            ("efo.r_rate", self.r_rate),
            ("efo.p_field", self.p_field),
            ("efo.n_field", self.n_field),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(IkError::Config(format!("{key} = {v} is outside [0, 1]")));
            }
        }
        if self.p_field + self.n_field > 1.0 {
            return Err(IkError::Config("efo.p_field + efo.n_field exceeds 1".into()));
        }
        if self.generations_per_step == 0 {
            return Err(IkError::Config("efo.generations_per_step must be at least 1".into()));
        }
        let (pos, neu, neg) = efo_fields(population, self);
        if pos.is_empty() || neu.is_empty() || neg.is_empty() {
            return Err(IkError::Config(format!(
                "efo.p_field/efo.n_field leave an empty field for population {population}"
            )));
        }
        Ok(())
    }
}

fn field_size(fraction: f64, n: usize) -> usize {
    // Products like 0.45 * 20 land a hair above the integer.
    ((fraction * n as f64 - 1e-9).ceil().max(0.0) as usize).min(n)
}

/// Index ranges of the positive, neutral and negative fields of a sorted
/// population of size `n`.
pub fn efo_fields(n: usize, params: &EfoParams) -> (Range<usize>, Range<usize>, Range<usize>) {
    let pos = field_size(params.p_field, n);
    let neg = field_size(params.n_field, n).min(n - pos);
    (0..pos, pos..n - neg, n - neg..n)
}

#[derive(Debug, Clone)]
pub struct EfoState {
    pub params: EfoParams,
    /// Ascending by cost.
    pub population: Vec<Candidate>,
}

impl EfoState {
    pub fn init<R: Rng + ?Sized>(problem: &SearchProblem, params: EfoParams, population: usize, rng: &mut R) -> Self {
        Self::from_population(params, problem.sample_population(population, rng))
    }

    pub fn from_population(params: EfoParams, mut population: Vec<Candidate>) -> Self {
        population.sort_by(|a, b| a.cost.total_cmp(&b.cost));
        Self { params, population }
    }

    /// Replaces the worst particle with `candidate` if it is strictly
    /// better, keeping the order. Returns whether it was inserted.
    pub fn insert(&mut self, candidate: Candidate) -> bool {
        match self.population.last() {
            Some(worst) if candidate.cost < worst.cost => {
                self.population.pop();
                let at = self.population.partition_point(|c| c.cost <= candidate.cost);
                self.population.insert(at, candidate);
                true
            }
            _ => false,
        }
    }
}

fn pick<R: Rng + ?Sized>(range: &Range<usize>, rng: &mut R) -> usize {
    rng.random_range(range.clone())
}

/// Builds one particle from the current fields.
pub fn efo_generate<R: Rng + ?Sized>(state: &EfoState, problem: &SearchProblem, rng: &mut R) -> Candidate {
    let (pos, neu, neg) = efo_fields(state.population.len(), &state.params);
    let pop = &state.population;
    let force: f64 = rng.random();
    let dim = problem.dimension();
    let mut next = Vec::with_capacity(dim);
    for d in 0..dim {
        let value = if rng.random::<f64>() < state.params.ps_rate {
            pop[pick(&pos, rng)].position[d]
        } else {
            let p = pop[pick(&pos, rng)].position[d];
            let m = pop[pick(&neu, rng)].position[d];
            let n = pop[pick(&neg, rng)].position[d];
            m + GOLDEN_RATIO * force * (p - m) - force * (n - m)
        };
        next.push(value);
    }
    if rng.random::<f64>() < state.params.r_rate {
        let d = rng.random_range(0..dim);
        next[d] = rng.random_range(problem.lower()[d]..=problem.upper()[d]);
    }
    problem.candidate(next)
}

pub fn efo_step<R: Rng + ?Sized>(state: &mut EfoState, problem: &SearchProblem, rng: &mut R) {
    for _ in 0..state.params.generations_per_step {
        let candidate = efo_generate(state, problem, rng);
        state.insert(candidate);
    }
}

impl Stepper for EfoState {
    fn step<R: Rng + ?Sized>(&mut self, problem: &SearchProblem, _iteration: usize, _total: usize, rng: &mut R) {
        efo_step(self, problem, rng);
    }

    fn best(&self) -> &Candidate {
        &self.population[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use crate::testing::{sphere_problem, toy_ik_problem};

    #[test]
    fn golden_ratio_constant() {
        assert!((GOLDEN_RATIO - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn field_partition_for_twenty() {
        let (pos, neu, neg) = efo_fields(20, &EfoParams::default());
        assert_eq!(pos, 0..2);
        assert_eq!(neg, 11..20);
        assert_eq!(neg.len(), 9);
        assert_eq!(neu, 2..11);
    }

    #[test]
    fn fields_partition_every_size() {
        let params = EfoParams::default();
        for n in 1..60 {
            let (pos, neu, neg) = efo_fields(n, &params);
            assert_eq!(pos.start, 0);
            assert_eq!(pos.end, neu.start);
            assert_eq!(neu.end, neg.start);
            assert_eq!(neg.end, n);
        }
    }

    #[test]
    fn validate_rejects_bad_fields() {
        assert!(EfoParams::default().validate(20).is_ok());
        assert!(EfoParams { p_field: 0.6, n_field: 0.5, ..Default::default() }.validate(20).is_err());
        assert!(EfoParams { ps_rate: 10.0, ..Default::default() }.validate(20).is_err());
        assert!(EfoParams::default().validate(2).is_err());
    }

    #[test]
    fn worse_particle_is_rejected() {
        let problem = sphere_problem(2);
        let pop = vec![problem.candidate(vec![0.0, 0.0]), problem.candidate(vec![1.0, 0.0])];
        let mut state = EfoState::from_population(EfoParams::default(), pop.clone());
        assert!(!state.insert(problem.candidate(vec![3.0, 3.0])));
        assert!(!state.insert(problem.candidate(vec![0.0, 1.0])));
        assert_eq!(state.population, pop);
    }

    #[test]
    fn better_particle_becomes_first() {
        let problem = sphere_problem(2);
        let pop = vec![problem.candidate(vec![2.0, 0.0]), problem.candidate(vec![1.0, 0.0])];
        let mut state = EfoState::from_population(EfoParams::default(), pop);
        assert!(state.insert(problem.candidate(vec![0.1, 0.0])));
        assert_eq!(state.population[0].position, vec![0.1, 0.0]);
        assert_eq!(state.population[1].position, vec![1.0, 0.0]);
    }

    #[test]
    fn sorted_monotone_fixed_size() {
        let problem = toy_ik_problem();
        let mut rng = seeded_rng(31);
        let mut state = EfoState::init(&problem, EfoParams::default(), 20, &mut rng);
        let mut last = state.best().cost;
        for _ in 0..500 {
            efo_step(&mut state, &problem, &mut rng);
            assert_eq!(state.population.len(), 20);
            assert!(state.population.windows(2).all(|w| w[0].cost <= w[1].cost));
            assert!(state.population.iter().all(|c| problem.contains(&c.position)));
            assert!(state.best().cost <= last);
            last = state.best().cost;
        }
    }
}
