//! Particle swarm optimization with a linearly decaying inertia weight.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::IkError;
use crate::problem::{best_index, Candidate, SearchProblem};
use crate::runner::Stepper;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoParams {
    /// Acceleration towards the particle's own best.
    pub c1: f64,
    /// Acceleration towards the swarm best.
    pub c2: f64,
    pub w_min: f64,
    pub w_max: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self { c1: 1.2, c2: 1.2, w_min: 0.4, w_max: 0.9 }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<(), IkError> {
        if !(0.0 <= self.w_min && self.w_min <= self.w_max) {
            return Err(IkError::Config("pso.w_min/pso.w_max: need 0 <= w_min <= w_max".into()));
        }
        if !(self.c1 > 0.0) {
            return Err(IkError::Config("pso.c1 must be positive".into()));
        }
        if !(self.c2 > 0.0) {
            return Err(IkError::Config("pso.c2 must be positive".into()));
        }
        Ok(())
    }

    /// Inertia weight at `iteration` (0-based): `w_max` at the first step,
    /// `w_min` at the last.
    pub fn inertia(&self, iteration: usize, total: usize) -> f64 {
        if total <= 1 {
            return self.w_max;
        }
        let frac = iteration.min(total - 1) as f64 / (total - 1) as f64;
        self.w_max - (self.w_max - self.w_min) * frac
    }
}

#[derive(Debug, Clone)]
pub struct PsoState {
    pub params: PsoParams,
    pub particles: Vec<Candidate>,
    pub velocities: Vec<Vec<f64>>,
    pub personal_best: Vec<Candidate>,
    pub global_best: Candidate,
}

impl PsoState {
    pub fn init<R: Rng + ?Sized>(problem: &SearchProblem, params: PsoParams, population: usize, rng: &mut R) -> Self {
        let particles = problem.sample_population(population, rng);
        Self::from_particles(params, particles)
    }

    /// Starts a swarm at rest at the given particles.
    pub fn from_particles(params: PsoParams, particles: Vec<Candidate>) -> Self {
        let dim = particles[0].position.len();
        let global_best = particles[best_index(&particles)].clone();
        Self {
            params,
            velocities: vec![vec![0.0; dim]; particles.len()],
            personal_best: particles.clone(),
            particles,
            global_best,
        }
    }
}

pub fn pso_step<R: Rng + ?Sized>(
    state: &mut PsoState,
    problem: &SearchProblem,
    iteration: usize,
    total: usize,
    rng: &mut R,
) {
    let PsoParams { c1, c2, .. } = state.params;
    let w = state.params.inertia(iteration, total);
    for i in 0..state.particles.len() {
        let pos = &state.particles[i].position;
        let pbest = &state.personal_best[i].position;
        let gbest = &state.global_best.position;
        let vel = &mut state.velocities[i];
        let mut next = Vec::with_capacity(pos.len());
        for d in 0..pos.len() {
            let r1: f64 = rng.random();
            let r2: f64 = rng.random();
            vel[d] = w * vel[d] + c1 * r1 * (pbest[d] - pos[d]) + c2 * r2 * (gbest[d] - pos[d]);
            next.push(pos[d] + vel[d]);
        }
        let moved = problem.candidate(next);
        if moved.cost < state.personal_best[i].cost {
            state.personal_best[i] = moved.clone();
            if moved.cost < state.global_best.cost {
                state.global_best = moved.clone();
            }
        }
        state.particles[i] = moved;
    }
}

impl Stepper for PsoState {
    fn step<R: Rng + ?Sized>(&mut self, problem: &SearchProblem, iteration: usize, total: usize, rng: &mut R) {
        pso_step(self, problem, iteration, total, rng);
    }

    fn best(&self) -> &Candidate {
        &self.global_best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use crate::testing::{sphere_problem, toy_ik_problem};

    #[test]
    fn inertia_endpoints() {
        let p = PsoParams::default();
        assert_eq!(p.inertia(0, 500), 0.9);
        assert!((p.inertia(499, 500) - 0.4).abs() < 1e-15);
        assert!(p.inertia(100, 500) > p.inertia(101, 500));
    }

    #[test]
    fn validate_rejects_bad_weights() {
        assert!(PsoParams { w_min: 1.0, w_max: 0.5, ..Default::default() }.validate().is_err());
        assert!(PsoParams { c1: 0.0, ..Default::default() }.validate().is_err());
        assert!(PsoParams::default().validate().is_ok());
    }

    #[test]
    fn collapsed_swarm_at_rest_stays_put() {
        let problem = sphere_problem(3);
        let c = problem.candidate(vec![0.3, -0.2, 0.1]);
        let mut state = PsoState::from_particles(PsoParams::default(), vec![c.clone(); 5]);
        pso_step(&mut state, &problem, 0, 10, &mut seeded_rng(1));
        assert!(state.particles.iter().all(|p| p == &c));
        assert!(state.velocities.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn ballistic_motion_without_attraction() {
        let problem = sphere_problem(2);
        let params = PsoParams { c1: 0.0, c2: 0.0, w_min: 1.0, w_max: 1.0 };
        let start = problem.candidate(vec![-4.0, 0.0]);
        let mut state = PsoState::from_particles(params, vec![start]);
        state.velocities[0] = vec![1.5, 0.25];
        let mut rng = seeded_rng(3);
        for t in 0..3 {
            pso_step(&mut state, &problem, t, 10, &mut rng);
        }
        let p = &state.particles[0].position;
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.75).abs() < 1e-12, "{p:?}");
        // Runs into the upper bound of 5 and stays clamped there.
        for t in 3..10 {
            pso_step(&mut state, &problem, t, 10, &mut rng);
        }
        assert_eq!(state.particles[0].position[0], 5.0);
        assert_eq!(state.velocities[0][0], 1.5);
    }

    #[test]
    fn global_best_monotone_and_in_bounds() {
        let problem = toy_ik_problem();
        let mut rng = seeded_rng(11);
        let mut state = PsoState::init(&problem, PsoParams::default(), 20, &mut rng);
        let mut last = state.global_best.cost;
        for t in 0..100 {
            pso_step(&mut state, &problem, t, 100, &mut rng);
            assert!(state.global_best.cost <= last);
            last = state.global_best.cost;
            assert!(state.particles.iter().all(|p| problem.contains(&p.position)));
            assert!(state.personal_best.iter().all(|p| p.cost >= state.global_best.cost));
        }
    }
}
