//! Multi-verse optimization.
//!
//! Universes with a high inflation rate (low cost) send coordinates through
//! white holes to universes with a low rate; wormholes pull coordinates
//! towards the best universe with a shrinking travel distance.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::IkError;
use crate::problem::{best_index, Candidate, SearchProblem};
use crate::runner::Stepper;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MvoParams {
    pub wep_min: f64,
    pub wep_max: f64,
    /// Exploitation accuracy exponent of the travel distance rate.
    pub p_exploit: f64,
    /// Schedule horizon; matches the run's iteration count.
    pub max_iterations: usize,
}

impl Default for MvoParams {
    fn default() -> Self {
        Self { wep_min: 0.2, wep_max: 1.0, p_exploit: 6.0, max_iterations: 500 }
    }
}

impl MvoParams {
    pub fn validate(&self, iterations: usize) -> Result<(), IkError> {
        if !(0.0 <= self.wep_min && self.wep_min <= self.wep_max && self.wep_max <= 1.0) {
            return Err(IkError::Config("mvo.wep_min/mvo.wep_max: need 0 <= wep_min <= wep_max <= 1".into()));
        }
        if !(self.p_exploit > 0.0) {
            return Err(IkError::Config("mvo.p_exploit must be positive".into()));
        }
        if self.max_iterations != iterations {
            return Err(IkError::Config(format!(
                "mvo.max_iterations = {} conflicts with iterations {iterations}",
                self.max_iterations
            )));
        }
        Ok(())
    }
}

/// Wormhole existence probability and travel distance rate at `iteration`.
pub fn mvo_schedules(iteration: usize, params: &MvoParams) -> (f64, f64) {
    let t = iteration as f64;
    let horizon = params.max_iterations as f64;
    let wep = params.wep_min + t * (params.wep_max - params.wep_min) / horizon;
    let inv = 1.0 / params.p_exploit;
    let tdr = 1.0 - t.powf(inv) / horizon.powf(inv);
    (wep, tdr)
}

/// Min-max normalized `1 / (1 + cost)`. A population with a single cost
/// level maps to all ones.
pub fn normalized_inflation(costs: &[f64]) -> Vec<f64> {
    let raw: Vec<f64> = costs.iter().map(|c| 1.0 / (1.0 + c)).collect();
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![1.0; raw.len()];
    }
    raw.iter().map(|r| (r - lo) / (hi - lo)).collect()
}

fn roulette<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return rng.random_range(0..weights.len());
    }
    let mut pick = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if pick < *w {
            return i;
        }
        pick -= w;
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

#[derive(Debug, Clone)]
pub struct MvoState {
    pub params: MvoParams,
    pub universes: Vec<Candidate>,
    pub best_universe: Candidate,
}

impl MvoState {
    pub fn init<R: Rng + ?Sized>(problem: &SearchProblem, params: MvoParams, population: usize, rng: &mut R) -> Self {
        Self::from_universes(params, problem.sample_population(population, rng))
    }

    pub fn from_universes(params: MvoParams, universes: Vec<Candidate>) -> Self {
        let best_universe = universes[best_index(&universes)].clone();
        Self { params, universes, best_universe }
    }
}

pub fn mvo_step<R: Rng + ?Sized>(state: &mut MvoState, problem: &SearchProblem, iteration: usize, rng: &mut R) {
    let (wep, tdr) = mvo_schedules(iteration, &state.params);
    mvo_step_with(state, problem, wep, tdr, rng);
}

/// One step with explicit schedule values.
pub fn mvo_step_with<R: Rng + ?Sized>(state: &mut MvoState, problem: &SearchProblem, wep: f64, tdr: f64, rng: &mut R) {
    state.universes.sort_by(|a, b| a.cost.total_cmp(&b.cost));
    let costs: Vec<f64> = state.universes.iter().map(|u| u.cost).collect();
    let inflation = normalized_inflation(&costs);
    let sorted: Vec<Vec<f64>> = state.universes.iter().map(|u| u.position.clone()).collect();
    let (lower, upper) = (problem.lower(), problem.upper());

    for i in 0..sorted.len() {
        let mut next = sorted[i].clone();
        for d in 0..next.len() {
            if rng.random::<f64>() < 1.0 - inflation[i] {
                let white = roulette(&inflation, rng);
                next[d] = sorted[white][d];
            }
            if rng.random::<f64>() < wep {
                let travel = tdr * ((upper[d] - lower[d]) * rng.random::<f64>() + lower[d]);
                let best = state.best_universe.position[d];
                next[d] = if rng.random::<f64>() < 0.5 { best + travel } else { best - travel };
            }
        }
        if next != sorted[i] {
            state.universes[i] = problem.candidate(next);
        }
    }

    let i = best_index(&state.universes);
    if state.universes[i].cost < state.best_universe.cost {
        state.best_universe = state.universes[i].clone();
    }
}

impl Stepper for MvoState {
    fn step<R: Rng + ?Sized>(&mut self, problem: &SearchProblem, iteration: usize, _total: usize, rng: &mut R) {
        mvo_step(self, problem, iteration, rng);
    }

    fn best(&self) -> &Candidate {
        &self.best_universe
    }
}
