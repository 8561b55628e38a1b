//! Iteration of the density-dependent models and numerical checks of the
//! hypotheses that govern their long-run behaviour.

mod bounds;
mod properties;
mod simulate;
mod step;
mod trichotomy;

pub use bounds::upper_bound_vector;
pub use properties::{
    check_eventual_positivity, check_eventual_positivity_map, check_linear_dominance, check_monotone,
    check_monotone_map, check_order_bound, check_strong_sublinear, check_strong_sublinear_map,
    egg_linearity_defect, PropertyReport, PropertyViolation, Verdict, ROUNDING_SLACK,
};
pub use simulate::{
    simulate, SimulationOptions, Trajectory, CONVERGENCE_TOLERANCE, DEFAULT_MAX_STEPS, OVERFLOW_NORM,
};
pub use step::{step, step_via_matrix, PopulationMap};
pub use trichotomy::{
    classify_trichotomy, default_initial_set, escape_check, find_fixed_point, EscapeCheck, Issue,
    OrbitEvidence, OrbitFate, Outcome, TrichotomyConfig, TrichotomyReport, AGREEMENT_TOLERANCE,
    EXTINCTION_NORM, NEAR_THRESHOLD, RESIDUAL_TOLERANCE, STRICT_MARGIN,
};
