//! Dominant eigenvalues, reproduction numbers, growth classification and
//! allocation analysis of the linear (low-density) models.

mod allocation;
mod classify;
mod eigen;
mod r0;
mod sensitivity;

pub use allocation::{
    allocation_surface, predicted_maximum, r0_two_egg_gradient, two_pool_gradient, AllocationSurface,
    Corners, PredictedMaximum, ARGMAX_TOLERANCE, DEFAULT_GRID_RESOLUTION,
};
pub use classify::{classify, ordering_holds, GrowthClassification, Regime, THRESHOLD_TOLERANCE};
pub use eigen::{dominant_eigenvalue, perron_vector, PowerIteration, EIGEN_MAX_ITERATIONS, EIGEN_TOLERANCE};
pub use r0::{
    member_r0s, next_generation_matrix, r0, r0_dense, r0_isolated_closed_form, r0_next_generation,
    r0_single_egg, r0_two_egg, two_pool_r0,
};
pub use sensitivity::{relative_step, sensitivity, ParamHandle, Rate};
