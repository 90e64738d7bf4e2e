//! Inverse kinematics of a 9-DOF hyper-redundant arm by metaheuristic
//! search.
//!
//! [`kinematics`] holds the DH model and the positional-error objective,
//! [`problem`] and [`runner`] the box-constrained problem and the seeded run
//! protocol, [`algorithms`] the six optimizers, and [`bench`] the
//! experiment harness behind the `ik9` command-line tool.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod bench;
pub mod error;
pub mod kinematics;
pub mod problem;
pub mod rng;
pub mod runner;

#[cfg(test)]
mod testing;

pub use error::IkError;
pub use kinematics::{
    dh_transform, fitness, forward_kinematics, objective, DhRow, HomogeneousTransform, JointConfig, Position,
    RobotModel, DOF,
};
pub use problem::{make_ik_problem, Candidate, SearchProblem};
pub use runner::{run, Algorithm, AlgorithmParams, ConvergenceTrace, RunConfig, Stepper};
