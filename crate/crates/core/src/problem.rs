//! Box-constrained search problems and the candidate type shared by all
//! optimizers.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::IkError;
use crate::kinematics::{objective, JointConfig, Position, RobotModel, DOF};

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A minimization problem over an axis-aligned box.
#[derive(Clone)]
pub struct SearchProblem {
    lower: Vec<f64>,
    upper: Vec<f64>,
    evaluate: Evaluator,
}

impl fmt::Debug for SearchProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SearchProblem").field("lower", &self.lower).field("upper", &self.upper).finish_non_exhaustive()
    }
}

impl SearchProblem {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, evaluate: Evaluator) -> Result<Self, IkError> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(IkError::InvalidInput(format!(
                "bound vectors must be non-empty and equal length (got {} and {})",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
            return Err(IkError::InvalidInput(format!(
                "empty bound interval at coordinate {i}: [{}, {}]",
                lower[i], upper[i]
            )));
        }
        Ok(Self { lower, upper, evaluate })
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn evaluate(&self, position: &[f64]) -> f64 {
        (self.evaluate)(position)
    }

    /// Replaces the objective, keeping the bounds. The closure receives the
    /// original objective so it can wrap it.
    pub fn wrap_evaluator<F>(&self, wrapper: F) -> Self
    where
        F: Fn(&[f64], &Evaluator) -> f64 + Send + Sync + 'static,
    {
        let inner = Arc::clone(&self.evaluate);
        Self { lower: self.lower.clone(), upper: self.upper.clone(), evaluate: Arc::new(move |x| wrapper(x, &inner)) }
    }

    pub fn contains(&self, position: &[f64]) -> bool {
        position.len() == self.dimension()
            && position.iter().zip(self.lower.iter().zip(&self.upper)).all(|(x, (lo, hi))| (*lo..=*hi).contains(x))
    }

    /// Coordinate-wise projection onto the box.
    pub fn clamp(&self, position: &[f64]) -> Vec<f64> {
        let mut out = position.to_vec();
        self.clamp_in_place(&mut out);
        out
    }

    pub fn clamp_in_place(&self, position: &mut [f64]) {
        for ((x, lo), hi) in position.iter_mut().zip(&self.lower).zip(&self.upper) {
            *x = x.clamp(*lo, *hi);
        }
    }

    /// Clamps `position` and evaluates it.
    pub fn candidate(&self, mut position: Vec<f64>) -> Candidate {
        self.clamp_in_place(&mut position);
        let cost = self.evaluate(&position);
        Candidate { position, cost }
    }

    /// Uniform draw inside the box.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Candidate {
        let position = self.lower.iter().zip(&self.upper).map(|(&lo, &hi)| rng.random_range(lo..=hi)).collect();
        self.candidate(position)
    }

    pub fn sample_population<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<Candidate> {
        (0..count).map(|_| self.sample_uniform(rng)).collect()
    }
}

/// IK problem: nine joint angles bounded by the model's joint limits,
/// scored by positional error to `target`.
pub fn make_ik_problem(model: &RobotModel, target: Position) -> Result<SearchProblem, IkError> {
    if !target.is_finite() {
        return Err(IkError::InvalidInput(format!("target {target:?} is not finite")));
    }
    let lower = model.lower_bounds();
    let upper = model.upper_bounds();
    let model = model.clone();
    let evaluate: Evaluator = Arc::new(move |x: &[f64]| {
        let mut theta = [0.0; DOF];
        theta.copy_from_slice(x);
        objective(&model, &target, &JointConfig::new(theta))
    });
    SearchProblem::new(lower, upper, evaluate)
}

/// A point in the search space with its cached objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub position: Vec<f64>,
    pub cost: f64,
}

impl Candidate {
    pub fn is_better_than(&self, other: &Candidate) -> bool {
        self.cost < other.cost
    }
}

/// Index of the lowest-cost candidate; ties go to the earliest.
pub fn best_index(population: &[Candidate]) -> usize {
    let mut best = 0;
    for (i, c) in population.iter().enumerate().skip(1) {
        if c.cost < population[best].cost {
            best = i;
        }
    }
    best
}

/// Coordinate-wise mean of the population, accumulated as offsets from the
/// first member so that a collapsed population has its exact position as
/// the mean.
pub fn centroid(population: &[Candidate]) -> Vec<f64> {
    let Some(first) = population.first() else {
        return Vec::new();
    };
    let n = population.len() as f64;
    let mut offset = vec![0.0; first.position.len()];
    for c in &population[1..] {
        for ((o, x), x0) in offset.iter_mut().zip(&c.position).zip(&first.position) {
            *o += x - x0;
        }
    }
    first.position.iter().zip(offset).map(|(x0, o)| x0 + o / n).collect()
}
