//! Config-driven runs: allocation sweeps, sensitivity tables, the
//! verification suite, and atomic CSV/JSON output.

mod config;
mod output;
mod run;
mod sweep;
mod verify;

pub use config::{Grid, ScenarioConfig, Task};
pub use output::{configure_threads, format_exact, format_number, write_atomic, write_text_atomic};
pub use run::{run_scenario, RunSummary};
pub use sweep::{
    linear_fit_residual, sensitivity_table, sweep_phi, sweep_phi2, unit_grid, Check, SweepRow, SweepTable,
    TableMetadata, CORNER_TOLERANCE, LINEAR_FIT_TOLERANCE, SENSITIVITY_FLOOR,
};
pub use verify::{bundled_spec, verify_suite, VerifyEntry, VerifyOptions, VerifyReport, BUNDLED_SPECS};
