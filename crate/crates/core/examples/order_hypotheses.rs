//! Numerical checks of the order properties behind the threshold result:
//! monotonicity, strong sublinearity, eventual positivity, linear egg rows,
//! and the order interval reached after two steps.

use partial_migration::dynamics::{
    check_eventual_positivity, check_monotone, check_order_bound, check_strong_sublinear,
    egg_linearity_defect, upper_bound_vector,
};
use partial_migration::{ModelSpec, Result};

fn main() -> Result<()> {
    let spec = ModelSpec::from_path(concat!(env!("CARGO_MANIFEST_DIR"), "/specs/bh_two_egg.json"))?;
    let seed = 11;
    let reports = [
        check_monotone(&spec, 2000, seed)?,
        check_strong_sublinear(&spec, spec.dim(), 500, seed)?,
        check_eventual_positivity(&spec, None, 50, seed)?,
        check_order_bound(&spec, 2000, seed)?,
    ];
    for r in &reports {
        println!(
            "{:<22} {:?} ({} samples, {} violations)",
            r.property, r.verdict, r.samples, r.violation_count
        );
    }
    println!(
        "egg linearity defect: {:.1e}",
        egg_linearity_defect(&spec, 500, seed)?
    );
    println!("upper bound a = {:.4?}", upper_bound_vector(&spec)?);
    Ok(())
}
