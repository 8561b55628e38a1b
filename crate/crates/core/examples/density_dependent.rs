//! Beverton-Holt survival: below the threshold every orbit dies out, above
//! it every orbit settles on the same positive equilibrium.

use partial_migration::dynamics::{classify_trichotomy, simulate, SimulationOptions, TrichotomyConfig};
use partial_migration::{ModelSpec, Result};

fn report(name: &str) -> Result<()> {
    let path = format!("{}/specs/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let spec = ModelSpec::from_path(path)?;
    let report = classify_trichotomy(&spec, TrichotomyConfig::default())?;
    println!(
        "{name}: R0 = {:.4}, outcome {}",
        report.r0_at_origin,
        report.outcome.label()
    );
    if let Some(q) = report.fixed_point() {
        println!(
            "  equilibrium {q:.6?}, residual {:.1e}",
            report.residual.unwrap_or(0.0)
        );
    }
    for orbit in report.orbits.iter().take(3) {
        println!(
            "  start {:.3?} -> {:?} after {} steps",
            orbit.start, orbit.fate, orbit.steps
        );
    }
    if let Some(escape) = &report.escape {
        println!(
            "  escape from the origin: {} (min gain {:.3e})",
            escape.passed, escape.min_gain
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    for name in ["bh_decline", "bh_isolated", "bh_single_egg", "bh_two_egg"] {
        report(name)?;
    }

    let spec = ModelSpec::from_path(concat!(env!("CARGO_MANIFEST_DIR"), "/specs/bh_isolated.json"))?;
    let options = SimulationOptions {
        record_every: Some(5),
        max_steps: 30,
        ..Default::default()
    };
    let t = simulate(&spec, &[0.01, 0.0], options)?;
    println!("trajectory from a small founding cohort:");
    for (step, x) in &t.states {
        println!("  {step:>3} {x:.6?}");
    }
    Ok(())
}
