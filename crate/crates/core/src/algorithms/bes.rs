//! Bald eagle search.
//!
//! One iteration runs three stages over the flock, each with greedy
//! per-eagle acceptance:
//!
//! 1. *select*: jump from the best eagle along the eagle-to-centroid
//!    direction, scaled by one uniform draw per eagle;
//! 2. *search*: spiral moves built from the neighbour and centroid
//!    differences;
//! 3. *swoop*: polar swoops towards the best eagle.
//!
//! Neighbours wrap around, so the last eagle pairs with the first.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::IkError;
use crate::problem::{best_index, centroid, Candidate, SearchProblem};
use crate::runner::Stepper;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BesParams {
    /// Spiral corner parameter: spiral angles are drawn from `[0, a·π]`.
    pub a_corner: f64,
    /// Number of search cycles scaling the spiral radius.
    pub r_cycles: f64,
    /// Movement intensity of the select stage, also the swoop angle scale.
    pub alpha_intensity: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for BesParams {
    fn default() -> Self {
        Self { a_corner: 10.0, r_cycles: 1.5, alpha_intensity: 2.0, c1: 2.0, c2: 2.0 }
    }
}

impl BesParams {
    pub fn validate(&self) -> Result<(), IkError> {
        if !(self.a_corner > 0.0) {
            return Err(IkError::Config("bes.a_corner must be positive".into()));
        }
        if !(self.r_cycles > 0.0) {
            return Err(IkError::Config("bes.r_cycles must be positive".into()));
        }
        if !(1.5..=2.0).contains(&self.alpha_intensity) {
            return Err(IkError::Config("bes.alpha_intensity must lie in [1.5, 2]".into()));
        }
        for (key, c) in [("bes.c1", self.c1), ("bes.c2", self.c2)] {
            if !(c > 0.0 && c <= 2.0) {
                return Err(IkError::Config(format!("{key} must lie in (0, 2]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesStage {
    Select,
    Search,
    Swoop,
}

#[derive(Debug, Clone)]
pub struct BesState {
    pub params: BesParams,
    pub population: Vec<Candidate>,
    pub best: Candidate,
    pub mean: Vec<f64>,
}

impl BesState {
    pub fn init<R: Rng + ?Sized>(problem: &SearchProblem, params: BesParams, population: usize, rng: &mut R) -> Self {
        Self::from_population(params, problem.sample_population(population, rng))
    }

    pub fn from_population(params: BesParams, population: Vec<Candidate>) -> Self {
        let best = population[best_index(&population)].clone();
        let mean = centroid(&population);
        Self { params, population, best, mean }
    }

    fn accept(&mut self, i: usize, candidate: Candidate) {
        if candidate.cost < self.population[i].cost {
            if candidate.cost < self.best.cost {
                self.best = candidate.clone();
            }
            self.population[i] = candidate;
        }
    }
}

/// Normalized polar coordinates: `θ = angle_scale·π·U`, `r = radius(θ)`,
/// then `x = r·sin θ`, `y = r·cos θ`, each divided by its maximum
/// magnitude. All-zero components stay zero. Also returns the angles.
fn polar<R, F>(count: usize, angle_scale: f64, mut radius: F, rng: &mut R) -> (Vec<f64>, Vec<f64>, Vec<f64>)
where
    R: Rng + ?Sized,
    F: FnMut(f64, &mut R) -> f64,
{
    let mut thetas = Vec::with_capacity(count);
    let mut xs = Vec::with_capacity(count);
    let mut ys = Vec::with_capacity(count);
    for _ in 0..count {
        let theta = angle_scale * PI * rng.random::<f64>();
        let r = radius(theta, rng);
        let (s, c) = theta.sin_cos();
        thetas.push(theta);
        xs.push(r * s);
        ys.push(r * c);
    }
    normalize_by_max(&mut xs);
    normalize_by_max(&mut ys);
    (xs, ys, thetas)
}

fn normalize_by_max(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max > 0.0 {
        v.iter_mut().for_each(|x| *x /= max);
    }
}

/// Spiral coordinates for the search stage.
pub fn bes_spiral_polar<R: Rng + ?Sized>(count: usize, params: &BesParams, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let (x, y, _) = spiral_draws(count, params, rng);
    (x, y)
}

fn spiral_draws<R: Rng + ?Sized>(count: usize, params: &BesParams, rng: &mut R) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let cycles = params.r_cycles;
    polar(count, params.a_corner, |theta, rng: &mut R| theta * cycles * rng.random::<f64>(), rng)
}

/// Swoop coordinates: the radius equals the angle.
pub fn bes_swoop_polar<R: Rng + ?Sized>(count: usize, params: &BesParams, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let (x, y, _) = polar(count, params.alpha_intensity, |theta, _: &mut R| theta, rng);
    (x, y)
}

pub fn bes_select_stage<R: Rng + ?Sized>(state: &mut BesState, problem: &SearchProblem, rng: &mut R) {
    state.mean = centroid(&state.population);
    let alpha = state.params.alpha_intensity;
    for i in 0..state.population.len() {
        let r: f64 = rng.random();
        let next: Vec<f64> = state
            .best
            .position
            .iter()
            .zip(&state.mean)
            .zip(&state.population[i].position)
            .map(|((b, m), p)| b + alpha * r * (m - p))
            .collect();
        let candidate = problem.candidate(next);
        state.accept(i, candidate);
    }
}

pub fn bes_search_stage<R: Rng + ?Sized>(state: &mut BesState, problem: &SearchProblem, rng: &mut R) {
    state.mean = centroid(&state.population);
    let n = state.population.len();
    let (x, y) = bes_spiral_polar(n, &state.params, rng);
    let snapshot: Vec<Vec<f64>> = state.population.iter().map(|c| c.position.clone()).collect();
    for i in 0..n {
        let p = &snapshot[i];
        let neighbour = &snapshot[(i + 1) % n];
        let next: Vec<f64> =
            (0..p.len()).map(|d| p[d] + y[i] * (p[d] - neighbour[d]) + x[i] * (p[d] - state.mean[d])).collect();
        let candidate = problem.candidate(next);
        state.accept(i, candidate);
    }
}

pub fn bes_swoop_stage<R: Rng + ?Sized>(state: &mut BesState, problem: &SearchProblem, rng: &mut R) {
    state.mean = centroid(&state.population);
    let n = state.population.len();
    let (x, y) = bes_swoop_polar(n, &state.params, rng);
    let BesParams { c1, c2, .. } = state.params;
    for i in 0..n {
        let p = &state.population[i].position;
        let best = &state.best.position;
        let r: f64 = rng.random();
        let next: Vec<f64> = (0..p.len())
            .map(|d| r * best[d] + x[i] * (p[d] - c1 * state.mean[d]) + y[i] * (p[d] - c2 * best[d]))
            .collect();
        let candidate = problem.candidate(next);
        state.accept(i, candidate);
    }
}

/// Runs the three stages in order, reporting each to `observer` before it
/// runs.
pub fn bes_step_observed<R, F>(state: &mut BesState, problem: &SearchProblem, rng: &mut R, mut observer: F)
where
    R: Rng + ?Sized,
    F: FnMut(BesStage),
{
    observer(BesStage::Select);
    bes_select_stage(state, problem, rng);
    observer(BesStage::Search);
    bes_search_stage(state, problem, rng);
    observer(BesStage::Swoop);
    bes_swoop_stage(state, problem, rng);
}

pub fn bes_step<R: Rng + ?Sized>(state: &mut BesState, problem: &SearchProblem, rng: &mut R) {
    bes_step_observed(state, problem, rng, |_| {});
}

impl Stepper for BesState {
    fn step<R: Rng + ?Sized>(&mut self, problem: &SearchProblem, _iteration: usize, _total: usize, rng: &mut R) {
        bes_step(self, problem, rng);
    }

    fn best(&self) -> &Candidate {
        &self.best
    }
}
