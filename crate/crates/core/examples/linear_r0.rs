//! Reproduction number and dominant eigenvalue for the three model kinds.
//!
//! ```text
//! cargo run --example linear_r0
//! ```

use partial_migration::spectral::{classify, member_r0s};
use partial_migration::{IsolatedSpec, ModelSpec};

fn main() -> partial_migration::Result<()> {
    let migrant = IsolatedSpec::linear(&[0.5, 0.4, 0.2], &[3.0, 10.0]);
    let resident = IsolatedSpec::linear(&[0.25, 0.2], &[2.0]);

    let specs = [
        ("migrants alone", ModelSpec::from(migrant.clone())),
        ("residents alone", ModelSpec::from(resident.clone())),
        (
            "one egg pool, phi = 0.5",
            ModelSpec::single_egg(migrant.clone(), resident.clone(), 0.5),
        ),
        (
            "two egg pools, phi = (0.5, 0.5)",
            ModelSpec::two_egg(migrant, resident, 0.5, 0.5),
        ),
    ];

    for (name, spec) in &specs {
        let c = classify(spec)?;
        println!(
            "{name:<34} R0 = {:>8.4}  lambda = {:.4}  {}",
            c.r0, c.lambda, c.regime
        );
        if let Some((rs, rr)) = member_r0s(spec)? {
            println!("{:<34} members: {rs:.4} / {rr:.4}", "");
        }
    }
    Ok(())
}
