//! Model specifications, their admissibility checks, and projection-matrix
//! assembly for the isolated, single-egg-pool and two-egg-pool topologies.

mod io;
mod layout;
mod rule;
mod spec;
mod validate;

pub use layout::{FecundityEntry, NextGenerationSplit, ProjectionLayout, TransitionEntry};
pub use rule::{BevertonHolt, TransitionRule};
pub use spec::{IsolatedSpec, ModelSpec, Population, SingleEggSpec, TwoEggSpec};
pub use validate::{validate, ValidationReport, Violation};
