//! Coral reefs optimization on a small rectangular reef.
//!
//! Each step is one reproductive cycle: broadcast spawning and brooding
//! produce larvae, larvae compete for cells, the healthiest corals bud
//! asexually, and a fraction of the weakest corals is predated. Health is
//! the negated cost.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::IkError;
use crate::problem::{Candidate, SearchProblem};
use crate::runner::Stepper;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CroParams {
    pub reef_rows: usize,
    pub reef_cols: usize,
    /// Fraction of cells occupied at initialization.
    pub rho0: f64,
    /// Fraction of corals spawning by crossover; the rest brood.
    pub f_broadcast: f64,
    /// Fraction of the healthiest corals that bud each cycle.
    pub f_asexual: f64,
    /// Fraction of the weakest corals exposed to depredation.
    pub f_depredation: f64,
    pub p_depredation: f64,
    pub larva_attempts: usize,
    /// Brooding mutation standard deviation, as a fraction of each
    /// coordinate's range.
    pub brood_sigma: f64,
}

impl Default for CroParams {
    fn default() -> Self {
        Self {
            reef_rows: 1,
            reef_cols: 20,
            rho0: 0.4,
            f_broadcast: 0.9,
            f_asexual: 0.1,
            f_depredation: 0.1,
            p_depredation: 0.1,
            larva_attempts: 3,
            brood_sigma: 0.05,
        }
    }
}

impl CroParams {
    pub fn cells(&self) -> usize {
        self.reef_rows * self.reef_cols
    }

    pub fn validate(&self, population: usize) -> Result<(), IkError> {
        let fractions = [
            ("cro.rho0", self.rho0),
            ("cro.f_broadcast", self.f_broadcast),
            ("cro.f_asexual", self.f_asexual),
            ("cro.f_depredation", self.f_depredation),
            ("cro.p_depredation", self.p_depredation),
        ];
        for (key, v) in fractions {
            if !(0.0..=1.0).contains(&v) {
                return Err(IkError::Config(format!("{key} = {v} is outside [0, 1]")));
            }
        }
        if self.cells() != population {
            return Err(IkError::Config(format!(
                "cro.reef_rows x cro.reef_cols = {} conflicts with population {population}",
                self.cells()
            )));
        }
        if self.initial_occupancy() == 0 {
            return Err(IkError::Config("cro.rho0 leaves the initial reef empty".into()));
        }
        if !(self.brood_sigma >= 0.0) {
            return Err(IkError::Config("cro.brood_sigma must be non-negative".into()));
        }
        Ok(())
    }

    pub fn initial_occupancy(&self) -> usize {
        (self.rho0 * self.cells() as f64).round() as usize
    }
}

#[derive(Debug, Clone)]
pub struct ReefState {
    pub params: CroParams,
    /// Row-major grid; `None` is a free cell.
    pub cells: Vec<Option<Candidate>>,
    best: Candidate,
}

impl ReefState {
    pub fn from_cells(params: CroParams, cells: Vec<Option<Candidate>>) -> Self {
        let best = cells
            .iter()
            .flatten()
            .min_by(|a, b| a.cost.total_cmp(&b.cost))
            .expect("reef has at least one coral")
            .clone();
        Self { params, cells, best }
    }

    pub fn occupied(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn corals(&self) -> impl Iterator<Item = &Candidate> {
        self.cells.iter().flatten()
    }

    fn occupied_indices(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].is_some()).collect()
    }

    fn refresh_best(&mut self) {
        if let Some(c) = self.corals().min_by(|a, b| a.cost.total_cmp(&b.cost)) {
            self.best = c.clone();
        }
    }

    /// Up to `larva_attempts` tries at random cells. Returns whether the
    /// larva settled.
    fn settle<R: Rng + ?Sized>(&mut self, larva: Candidate, rng: &mut R) -> bool {
        for _ in 0..self.params.larva_attempts {
            let cell = rng.random_range(0..self.cells.len());
            match &self.cells[cell] {
                None => {
                    self.cells[cell] = Some(larva);
                    return true;
                }
                Some(occupant) if larva.cost < occupant.cost => {
                    self.cells[cell] = Some(larva);
                    return true;
                }
                Some(_) => {}
            }
        }
        false
    }
}

pub fn cro_init<R: Rng + ?Sized>(problem: &SearchProblem, params: CroParams, rng: &mut R) -> ReefState {
    let n = params.cells();
    let k = params.initial_occupancy().clamp(1, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut cells = vec![None; n];
    for &cell in &order[..k] {
        cells[cell] = Some(problem.sample_uniform(rng));
    }
    ReefState::from_cells(params, cells)
}

fn one_point_crossover<R: Rng + ?Sized>(a: &[f64], b: &[f64], rng: &mut R) -> Vec<f64> {
    if a.len() < 2 {
        return a.to_vec();
    }
    let cut = rng.random_range(1..a.len());
    a[..cut].iter().chain(&b[cut..]).copied().collect()
}

fn brood<R: Rng + ?Sized>(problem: &SearchProblem, coral: &[f64], sigma: f64, rng: &mut R) -> Vec<f64> {
    coral
        .iter()
        .zip(problem.lower().iter().zip(problem.upper()))
        .map(|(&x, (&lo, &hi))| {
            let z: f64 = StandardNormal.sample(rng);
            x + z * sigma * (hi - lo)
        })
        .collect()
}

pub fn cro_step<R: Rng + ?Sized>(state: &mut ReefState, problem: &SearchProblem, rng: &mut R) {
    let params = state.params;

    // Sexual reproduction.
    let mut parents = state.occupied_indices();
    parents.shuffle(rng);
    let mut n_broadcast = (params.f_broadcast * parents.len() as f64).round() as usize;
    n_broadcast -= n_broadcast % 2;
    let mut larvae = Vec::with_capacity(parents.len());
    for pair in parents[..n_broadcast].chunks_exact(2) {
        let a = &state.cells[pair[0]].as_ref().unwrap().position;
        let b = &state.cells[pair[1]].as_ref().unwrap().position;
        let child = one_point_crossover(a, b, rng);
        larvae.push(problem.candidate(child));
    }
    for &i in &parents[n_broadcast..] {
        let coral = &state.cells[i].as_ref().unwrap().position;
        let child = brood(problem, coral, params.brood_sigma, rng);
        larvae.push(problem.candidate(child));
    }
    for larva in larvae {
        state.settle(larva, rng);
    }

    // Asexual budding of the healthiest corals.
    let mut ranked: Vec<Candidate> = state.corals().cloned().collect();
    ranked.sort_by(|a, b| a.cost.total_cmp(&b.cost));
    let n_bud = (params.f_asexual * ranked.len() as f64).round() as usize;
    for bud in ranked.into_iter().take(n_bud) {
        state.settle(bud, rng);
    }

    // Depredation of the weakest corals. The healthiest cost level is never
    // exposed, so the reef cannot empty.
    let mut weakest = state.occupied_indices();
    weakest.sort_by(|&a, &b| {
        let ca = state.cells[a].as_ref().unwrap().cost;
        let cb = state.cells[b].as_ref().unwrap().cost;
        cb.total_cmp(&ca).then(a.cmp(&b))
    });
    let n_exposed = (params.f_depredation * weakest.len() as f64).round() as usize;
    let floor = state.corals().map(|c| c.cost).fold(f64::INFINITY, f64::min);
    for &cell in weakest.iter().take(n_exposed) {
        let roll: f64 = rng.random();
        if roll < params.p_depredation && state.cells[cell].as_ref().unwrap().cost > floor {
            state.cells[cell] = None;
        }
    }

    state.refresh_best();
}

impl Stepper for ReefState {
    fn step<R: Rng + ?Sized>(&mut self, problem: &SearchProblem, _iteration: usize, _total: usize, rng: &mut R) {
        cro_step(self, problem, rng);
    }

    fn best(&self) -> &Candidate {
        &self.best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use crate::testing::{sphere_problem, toy_ik_problem};

    #[test]
    fn init_occupancy() {
        let problem = toy_ik_problem();
        let reef = cro_init(&problem, CroParams::default(), &mut seeded_rng(1));
        assert_eq!(reef.cells.len(), 20);
        assert_eq!(reef.occupied(), 8);

        let full = CroParams { rho0: 1.0, ..Default::default() };
        assert_eq!(cro_init(&problem, full, &mut seeded_rng(1)).occupied(), 20);
    }

    #[test]
    fn init_is_seeded() {
        let problem = toy_ik_problem();
        let a = cro_init(&problem, CroParams::default(), &mut seeded_rng(5));
        let b = cro_init(&problem, CroParams::default(), &mut seeded_rng(5));
        assert_eq!(a.cells, b.cells);
    }

    #[test]
    fn validate_checks_reef_size_and_fractions() {
        assert!(CroParams::default().validate(20).is_ok());
        assert!(CroParams::default().validate(30).is_err());
        assert!(CroParams { p_depredation: 1.5, ..Default::default() }.validate(20).is_err());
        assert!(CroParams { rho0: 0.0, ..Default::default() }.validate(20).is_err());
    }

    #[test]
    fn identical_corals_without_mutation_keep_their_cost() {
        let problem = sphere_problem(4);
        let coral = problem.candidate(vec![1.0, -1.0, 0.5, 2.0]);
        let params = CroParams { brood_sigma: 0.0, ..Default::default() };
        let mut cells = vec![None; 20];
        for cell in cells.iter_mut().step_by(2) {
            *cell = Some(coral.clone());
        }
        let mut reef = ReefState::from_cells(params, cells);
        let mut rng = seeded_rng(9);
        for _ in 0..20 {
            cro_step(&mut reef, &problem, &mut rng);
            assert!(reef.corals().all(|c| c.cost == coral.cost));
        }
    }

    #[test]
    fn settlement_never_installs_a_worse_larva() {
        let problem = sphere_problem(2);
        let good = problem.candidate(vec![0.0, 0.0]);
        let bad = problem.candidate(vec![4.0, 4.0]);
        let params = CroParams { reef_cols: 3, larva_attempts: 50, ..Default::default() };
        let mut reef = ReefState::from_cells(params, vec![Some(good.clone()); 3]);
        assert!(!reef.settle(bad, &mut seeded_rng(2)));
        assert!(reef.corals().all(|c| *c == good));
    }

    #[test]
    fn best_coral_survives_certain_depredation() {
        let problem = sphere_problem(3);
        let params = CroParams { p_depredation: 1.0, f_depredation: 0.9, brood_sigma: 0.0, ..Default::default() };
        let mut rng = seeded_rng(4);
        let cells: Vec<_> = (0..20).map(|_| Some(problem.sample_uniform(&mut rng))).collect();
        let mut reef = ReefState::from_cells(params, cells);
        let best = reef.best().cost;
        cro_step(&mut reef, &problem, &mut rng);
        assert!(reef.corals().any(|c| c.cost <= best));
    }

    #[test]
    fn invariants_over_a_run() {
        let problem = toy_ik_problem();
        let params = CroParams { p_depredation: 0.0, ..Default::default() };
        let mut rng = seeded_rng(21);
        let mut reef = cro_init(&problem, params, &mut rng);
        let mut last = reef.best().cost;
        for _ in 0..200 {
            cro_step(&mut reef, &problem, &mut rng);
            assert!(reef.occupied() >= 1 && reef.occupied() <= 20);
            assert!(reef.corals().all(|c| problem.contains(&c.position)));
            let best = reef.corals().map(|c| c.cost).fold(f64::INFINITY, f64::min);
            assert!(best <= last);
            last = best;
        }
    }
}
