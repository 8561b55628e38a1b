//! Runs a scenario file, the same way `pm run --config` does.
//!
//! ```text
//! cargo run --example run_config -- scenarios/bh_classify.json
//! ```

use partial_migration::experiment::{run_scenario, ScenarioConfig};

fn main() -> partial_migration::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/two_egg_surface.json").into());
    let config = ScenarioConfig::from_path(&path)?;
    let summary = run_scenario(&config)?;
    println!(
        "task {} on spec {}",
        summary.task.name(),
        summary.spec_hash.as_deref().unwrap_or("-")
    );
    for line in &summary.lines {
        println!("  {line}");
    }
    println!("passed: {}", summary.passed);
    Ok(())
}
