//! Nuclear reaction optimization, reduced to a fission phase followed by a
//! fusion phase.
//!
//! Fission: each nucleus splits with probability `p_fi`. The product is a
//! Gaussian sample around the midpoint between the nucleus and the best
//! nucleus, or (with probability `p_beta`, the decay branch) a tighter
//! sample around the best nucleus itself. Fusion: each nucleus combines
//! with two random partners relative to the best, weighted by a sinusoid of
//! the iteration. Both phases accept greedily.
//!
//! The Lévy-flight and ionization stages of the full algorithm are not
//! implemented.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::IkError;
use crate::problem::{best_index, Candidate, SearchProblem};
use crate::runner::Stepper;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NroParams {
    /// Frequency of the fusion weight sinusoid, in cycles per iteration.
    pub freq: f64,
    /// Fission standard deviation as a fraction of each coordinate's range.
    pub scaling: f64,
    pub p_beta: f64,
    pub p_fi: f64,
}

impl Default for NroParams {
    fn default() -> Self {
        Self { freq: 0.05, scaling: 0.01, p_beta: 0.1, p_fi: 0.75 }
    }
}

impl NroParams {
    pub fn validate(&self) -> Result<(), IkError> {
        for (key, v) in [("nro.p_beta", self.p_beta), ("nro.p_fi", self.p_fi)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(IkError::Config(format!("{key} = {v} is outside [0, 1]")));
            }
        }
        if !(self.freq > 0.0) {
            return Err(IkError::Config("nro.freq must be positive".into()));
        }
        if !(self.scaling > 0.0) {
            return Err(IkError::Config("nro.scaling must be positive".into()));
        }
        Ok(())
    }

    pub fn fusion_weight(&self, iteration: usize) -> f64 {
        (2.0 * PI * self.freq * iteration as f64).sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NroPhase {
    Fission,
    Fusion,
}

#[derive(Debug, Clone)]
pub struct NroState {
    pub params: NroParams,
    pub nuclei: Vec<Candidate>,
    pub best_nucleus: Candidate,
}

impl NroState {
    pub fn init<R: Rng + ?Sized>(problem: &SearchProblem, params: NroParams, population: usize, rng: &mut R) -> Self {
        Self::from_nuclei(params, problem.sample_population(population, rng))
    }

    pub fn from_nuclei(params: NroParams, nuclei: Vec<Candidate>) -> Self {
        let best_nucleus = nuclei[best_index(&nuclei)].clone();
        Self { params, nuclei, best_nucleus }
    }

    fn accept(&mut self, i: usize, candidate: Candidate) {
        if candidate.cost < self.nuclei[i].cost {
            if candidate.cost < self.best_nucleus.cost {
                self.best_nucleus = candidate.clone();
            }
            self.nuclei[i] = candidate;
        }
    }
}

fn gaussian_around<R: Rng + ?Sized>(center: &[f64], problem: &SearchProblem, scale: f64, rng: &mut R) -> Vec<f64> {
    center
        .iter()
        .zip(problem.lower().iter().zip(problem.upper()))
        .map(|(&c, (&lo, &hi))| {
            let z: f64 = StandardNormal.sample(rng);
            c + z * scale * (hi - lo)
        })
        .collect()
}

pub fn nro_fission_phase<R: Rng + ?Sized>(state: &mut NroState, problem: &SearchProblem, rng: &mut R) {
    let NroParams { scaling, p_beta, p_fi, .. } = state.params;
    for i in 0..state.nuclei.len() {
        if rng.random::<f64>() >= p_fi {
            continue;
        }
        let best = &state.best_nucleus.position;
        let product = if rng.random::<f64>() < p_beta {
            gaussian_around(best, problem, 0.5 * scaling, rng)
        } else {
            let center: Vec<f64> = state.nuclei[i].position.iter().zip(best).map(|(p, b)| 0.5 * (p + b)).collect();
            gaussian_around(&center, problem, scaling, rng)
        };
        let candidate = problem.candidate(product);
        state.accept(i, candidate);
    }
}

pub fn nro_fusion_phase<R: Rng + ?Sized>(state: &mut NroState, problem: &SearchProblem, iteration: usize, rng: &mut R) {
    let n = state.nuclei.len();
    if n < 3 {
        return;
    }
    let weight = state.params.fusion_weight(iteration);
    for i in 0..n {
        let j = loop {
            let j = rng.random_range(0..n);
            if j != i {
                break j;
            }
        };
        let k = loop {
            let k = rng.random_range(0..n);
            if k != i && k != j {
                break k;
            }
        };
        let w1 = weight * rng.random::<f64>();
        let w2 = weight * rng.random::<f64>();
        let best = &state.best_nucleus.position;
        let (pi, pj, pk) = (&state.nuclei[i].position, &state.nuclei[j].position, &state.nuclei[k].position);
        let fused: Vec<f64> = (0..pi.len()).map(|d| pi[d] + w1 * (pj[d] - best[d]) + w2 * (pk[d] - best[d])).collect();
        let candidate = problem.candidate(fused);
        state.accept(i, candidate);
    }
}

/// Fission then fusion, reporting each phase to `observer` before it runs.
pub fn nro_step_observed<R, F>(
    state: &mut NroState,
    problem: &SearchProblem,
    iteration: usize,
    rng: &mut R,
    mut observer: F,
) where
    R: Rng + ?Sized,
    F: FnMut(NroPhase),
{
    observer(NroPhase::Fission);
    nro_fission_phase(state, problem, rng);
    observer(NroPhase::Fusion);
    nro_fusion_phase(state, problem, iteration, rng);
}

pub fn nro_step<R: Rng + ?Sized>(state: &mut NroState, problem: &SearchProblem, iteration: usize, rng: &mut R) {
    nro_step_observed(state, problem, iteration, rng, |_| {});
}

impl Stepper for NroState {
    fn step<R: Rng + ?Sized>(&mut self, problem: &SearchProblem, iteration: usize, _total: usize, rng: &mut R) {
        nro_step(self, problem, iteration, rng);
    }

    fn best(&self) -> &Candidate {
        &self.best_nucleus
    }
}
