//! The deterministic verification suite behind `pm verify`.

use partial_migration::experiment::{verify_suite, VerifyOptions};

fn main() {
    let report = verify_suite(&VerifyOptions {
        samples: 200,
        ..Default::default()
    });
    println!("{} checks passed, {} failed", report.passed, report.failed);
    for f in report.failures() {
        println!("FAIL {} {}: {}", f.spec, f.check.name, f.check.detail);
    }
}
