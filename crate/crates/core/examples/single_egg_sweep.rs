//! With a single shared egg pool, R0 is a straight line in the allocation
//! `phi`, running from the resident value to the migrant value.

use partial_migration::experiment::{sweep_phi, unit_grid};
use partial_migration::{ModelSpec, Result};

fn main() -> Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/specs/single_egg.json");
    let ModelSpec::SingleEgg(spec) = ModelSpec::from_path(path)? else {
        panic!("expected a single_egg spec");
    };
    let table = sweep_phi(&spec, &unit_grid(11)?)?;
    for row in &table.rows {
        println!(
            "phi = {:.1}  R0 = {:.6}",
            row.params[0],
            row.value.unwrap_or(f64::NAN)
        );
    }
    for check in &table.checks {
        println!(
            "{}: {} ({})",
            check.name,
            if check.passed { "ok" } else { "FAILED" },
            check.detail
        );
    }
    Ok(())
}
