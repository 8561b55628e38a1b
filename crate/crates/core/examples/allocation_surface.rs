//! Two egg pools: R0 over the allocation square. The maximum sits on the
//! edge where the stronger member keeps all of its own eggs.

use partial_migration::spectral::{allocation_surface, r0_two_egg_gradient};
use partial_migration::{ModelSpec, Result};

fn main() -> Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/specs/two_egg.json");
    let ModelSpec::TwoEgg(spec) = ModelSpec::from_path(path)? else {
        panic!("expected a two_egg spec");
    };
    let surface = allocation_surface(&spec, 11)?;

    print!("phi_s\\phi_r");
    for pr in &surface.grid {
        print!(" {pr:>6.1}");
    }
    println!();
    for (i, ps) in surface.grid.iter().enumerate() {
        print!("{ps:>11.1}");
        for j in 0..surface.resolution() {
            print!(" {:>6.3}", surface.value(i, j));
        }
        println!();
    }

    println!(
        "members: migrant {:.4}, resident {:.4}",
        surface.r0_migrant, surface.r0_resident
    );
    println!(
        "predicted maximum: {:?}, observed max {:.6}",
        surface.predicted, surface.max
    );
    println!("corners: {:?}", surface.corners);
    let (ds, dr) = r0_two_egg_gradient(&spec, 0.5, 0.5)?;
    println!("gradient at (0.5, 0.5): ({ds:.6}, {dr:.6})");
    Ok(())
}
