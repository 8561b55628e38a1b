//! Finite-difference derivatives of R0 with respect to every vital rate.

use partial_migration::experiment::sensitivity_table;
use partial_migration::spectral::ParamHandle;
use partial_migration::{ModelSpec, Result};

fn main() -> Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/specs/two_egg.json");
    let spec = ModelSpec::from_path(path)?;
    let table = sensitivity_table(&spec, &ParamHandle::all_for(&spec), 1e-6)?;
    for row in &table.rows {
        let label = row.label.as_deref().unwrap_or("?");
        match row.value {
            Some(v) => println!("dR0/d{label:<14} {v:>12.6}"),
            None => println!("dR0/d{label:<14} {}", row.note.as_deref().unwrap_or("n/a")),
        }
    }
    Ok(())
}
