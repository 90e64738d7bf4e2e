//! The six population-based optimizers. Each keeps its own state type and
//! implements [`Stepper`](crate::runner::Stepper); all of them clamp every
//! proposal into the search box before evaluating it.

pub mod bes;
pub mod cro;
pub mod efo;
pub mod mvo;
pub mod nro;
pub mod pso;

pub use bes::{bes_step, BesParams, BesState};
pub use cro::{cro_init, cro_step, CroParams, ReefState};
pub use efo::{efo_step, EfoParams, EfoState};
pub use mvo::{mvo_step, MvoParams, MvoState};
pub use nro::{nro_step, NroParams, NroState};
pub use pso::{pso_step, PsoParams, PsoState};
