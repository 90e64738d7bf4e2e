//! Small fixtures shared by the unit tests.

use std::sync::Arc;

use crate::kinematics::{Position, RobotModel};
use crate::problem::{make_ik_problem, SearchProblem};

/// Sum of squares on `[-5, 5]^dim`.
pub fn sphere_problem(dim: usize) -> SearchProblem {
    SearchProblem::new(vec![-5.0; dim], vec![5.0; dim], Arc::new(|x: &[f64]| x.iter().map(|v| v * v).sum())).unwrap()
}

pub fn toy_ik_problem() -> SearchProblem {
    make_ik_problem(&RobotModel::default(), Position::new(1.0, 1.0, 7.0)).unwrap()
}
