//! Stage-structured population models of partial migration.
//!
//! Four model families share one state layout convention: an isolated
//! population, migrants and residents drawing on a single egg pool, and
//! migrants and residents with separate egg pools. Each comes in a linear
//! form (constant transition probabilities) and a density-dependent form
//! (Beverton–Holt transitions).
//!
//! * [`model`]: specifications, validation, projection matrices.
//! * [`spectral`]: dominant eigenvalues and reproduction numbers.
//! * [`dynamics`]: iteration of the nonlinear maps and numerical checks of
//!   the monotone-systems hypotheses behind their global behaviour.
//! * [`experiment`]: config-driven sweeps, tables and the verification suite.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod matrix;
pub mod model;
pub mod sampling;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use model::{IsolatedSpec, ModelSpec, Population, SingleEggSpec, TransitionRule, TwoEggSpec};
