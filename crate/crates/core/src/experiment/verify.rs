//! The verification suite run by `pm verify`: oracle and property checks
//! over the bundled specs and a seeded batch of random specs. The report
//! holds no timing data, so equal seeds give byte-identical output.

use rayon::prelude::*;
use serde::Serialize;

use super::sweep::{sensitivity_table, sweep_phi, sweep_phi2, unit_grid, Check};
use crate::dynamics::{
    check_eventual_positivity, check_linear_dominance, check_monotone, check_order_bound,
    check_strong_sublinear, classify_trichotomy, egg_linearity_defect, PropertyReport, TrichotomyConfig,
};
use crate::error::Result;
use crate::model::ModelSpec;
use crate::sampling::{SamplerOptions, SpecSampler};
use crate::spectral::{classify, member_r0s, r0, r0_dense, two_pool_gradient, two_pool_r0, ParamHandle};

/// Specs shipped with the crate, by file stem.
pub const BUNDLED_SPECS: &[(&str, &str)] = &[
    ("migrant", include_str!("../../specs/migrant.json")),
    ("resident", include_str!("../../specs/resident.json")),
    ("single_egg", include_str!("../../specs/single_egg.json")),
    ("two_egg", include_str!("../../specs/two_egg.json")),
    ("bh_isolated", include_str!("../../specs/bh_isolated.json")),
    ("bh_decline", include_str!("../../specs/bh_decline.json")),
    ("bh_single_egg", include_str!("../../specs/bh_single_egg.json")),
    ("bh_two_egg", include_str!("../../specs/bh_two_egg.json")),
    ("bad_t1_zero", include_str!("../../specs/bad_t1_zero.json")),
];

/// Parses a bundled spec by name.
pub fn bundled_spec(name: &str) -> Option<ModelSpec> {
    BUNDLED_SPECS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| ModelSpec::from_json(text).expect("bundled specs parse"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random specs per model kind for the oracle checks.
    pub random_specs: usize,
    /// Samples per property check.
    pub samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 42,
            random_specs: 50,
            samples: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyEntry {
    pub spec: String,
    #[serde(flatten)]
    pub check: Check,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub tool_version: String,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<VerifyEntry>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerifyEntry> {
        self.checks.iter().filter(|e| !e.check.passed)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serialisable")
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
}

fn from_property(report: Result<PropertyReport>) -> Check {
    match report {
        Ok(r) => Check::new(
            &r.property,
            r.passed(),
            format!("{} violations in {} samples", r.violation_count, r.samples),
        ),
        Err(e) => Check::new("property", false, e.to_string()),
    }
}

fn linear_checks(spec: &ModelSpec) -> Vec<Check> {
    let mut out = Vec::new();
    let oracle = spec.next_generation_split().and_then(|s| r0_dense(&s));
    match (r0(spec), oracle) {
        (Ok(a), Ok(b)) => out.push(Check::new(
            "r0_matches_next_generation",
            rel_close(a, b, 1e-10),
            format!("closed form {a:.12e}, dense {b:.12e}"),
        )),
        (a, b) => out.push(Check::new(
            "r0_matches_next_generation",
            false,
            format!("{:?} / {:?}", a.err(), b.err()),
        )),
    }
    out.push(match classify(spec) {
        Ok(c) => Check::new(
            "lambda_r0_ordering",
            true,
            format!("lambda {:.12e}, r0 {:.12e}, {}", c.lambda, c.r0, c.regime),
        ),
        Err(e) => Check::new("lambda_r0_ordering", false, e.to_string()),
    });
    out
}

fn gradient_check(rs: f64, rr: f64) -> Check {
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for k in 1..10 {
        let (ps, pr) = (k as f64 / 10.0, 1.0 - k as f64 / 11.0);
        let f = |a, b| two_pool_r0(rs, rr, a, b).unwrap_or(f64::NAN);
        match two_pool_gradient(rs, rr, ps, pr) {
            Ok((ds, dr)) => {
                let fs = (f(ps + h, pr) - f(ps - h, pr)) / (2.0 * h);
                let fr = (f(ps, pr + h) - f(ps, pr - h)) / (2.0 * h);
                worst = worst.max((ds - fs).abs()).max((dr - fr).abs());
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    Check::new(
        "gradient_matches_differences",
        worst <= 1e-6,
        format!("max error {worst:.3e}"),
    )
}

fn table_checks(result: Result<super::SweepTable>) -> Vec<Check> {
    match result {
        Ok(t) => t.checks,
        Err(e) => vec![Check::new("table", false, e.to_string())],
    }
}

fn coupled_checks(spec: &ModelSpec) -> Vec<Check> {
    let mut out = Vec::new();
    match spec {
        ModelSpec::SingleEgg(s) => {
            out.extend(table_checks(unit_grid(101).and_then(|g| sweep_phi(s, &g))));
        }
        ModelSpec::TwoEgg(s) => {
            out.extend(table_checks(unit_grid(21).and_then(|g| sweep_phi2(s, &g, &g))));
            if let Ok(Some((rs, rr))) = member_r0s(spec) {
                out.push(gradient_check(rs, rr));
            }
        }
        ModelSpec::Isolated(_) => {}
    }
    out
}

fn dynamic_checks(spec: &ModelSpec, seed: u64, samples: usize) -> Vec<Check> {
    let dim = spec.dim();
    let mut out = vec![
        from_property(check_monotone(spec, samples, seed)),
        from_property(check_strong_sublinear(spec, dim, samples, seed)),
        from_property(check_eventual_positivity(spec, None, samples / 10, seed)),
        from_property(check_order_bound(spec, samples, seed)),
        from_property(check_linear_dominance(spec, samples, seed)),
    ];
    out.push(match egg_linearity_defect(spec, samples, seed) {
        Ok(d) => Check::new("egg_update_linear", d <= 1e-14, format!("max defect {d:.3e}")),
        Err(e) => Check::new("egg_update_linear", false, e.to_string()),
    });
    let config = TrichotomyConfig {
        seed,
        ..Default::default()
    };
    out.push(match classify_trichotomy(spec, config) {
        Ok(r) => Check::new(
            "trichotomy_consistent",
            r.is_consistent(),
            format!(
                "{} (r0 {:.12e}), issues {:?}",
                r.outcome.label(),
                r.r0_at_origin,
                r.issues
            ),
        ),
        Err(e) => Check::new("trichotomy_consistent", false, e.to_string()),
    });
    out
}

fn bundled_checks(name: &str, spec: &ModelSpec, options: &VerifyOptions) -> Vec<Check> {
    let report = spec.validate();
    if name.starts_with("bad_") {
        return vec![Check::new(
            "rejected_as_invalid",
            !report.is_valid(),
            report.to_string(),
        )];
    }
    if !report.is_valid() {
        return vec![Check::new("valid", false, report.to_string())];
    }
    let mut out = linear_checks(spec);
    out.extend(coupled_checks(spec));
    out.extend(table_checks(sensitivity_table(
        spec,
        &ParamHandle::all_for(spec),
        1e-6,
    )));
    if spec.is_density_dependent() {
        out.extend(dynamic_checks(spec, options.seed, options.samples));
    }
    out
}

/// Runs the suite. Checks are listed in a fixed order regardless of thread
/// count.
pub fn verify_suite(options: &VerifyOptions) -> VerifyReport {
    let bundled: Vec<(String, ModelSpec)> = BUNDLED_SPECS
        .iter()
        .map(|(n, text)| {
            (
                n.to_string(),
                ModelSpec::from_json(text).expect("bundled specs parse"),
            )
        })
        .collect();
    let mut sampler = SpecSampler::new(options.seed, SamplerOptions::default());
    let mut random: Vec<(String, ModelSpec)> = Vec::new();
    for k in 0..options.random_specs {
        random.push((format!("random_isolated_{k}"), sampler.isolated().into()));
        random.push((format!("random_single_egg_{k}"), sampler.single_egg()));
        random.push((format!("random_two_egg_{k}"), sampler.two_egg()));
    }

    let mut checks: Vec<VerifyEntry> = bundled
        .par_iter()
        .map(|(name, spec)| {
            bundled_checks(name, spec, options)
                .into_iter()
                .map(|check| VerifyEntry {
                    spec: name.clone(),
                    check,
                })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    checks.extend(
        random
            .par_iter()
            .map(|(name, spec)| {
                linear_checks(spec)
                    .into_iter()
                    .map(|check| VerifyEntry {
                        spec: name.clone(),
                        check,
                    })
                    .collect::<Vec<_>>()
            })
            .flatten()
            .collect::<Vec<_>>(),
    );
    let failed = checks.iter().filter(|e| !e.check.passed).count();
    VerifyReport {
        seed: options.seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        passed: checks.len() - failed,
        failed,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_specs_parse() {
        for (name, _) in BUNDLED_SPECS {
            assert!(bundled_spec(name).is_some());
        }
        assert!(!bundled_spec("bad_t1_zero").unwrap().validate().is_valid());
        assert!(bundled_spec("nope").is_none());
    }

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let options = VerifyOptions {
            seed: 3,
            random_specs: 5,
            samples: 200,
        };
        let a = verify_suite(&options);
        if let Some(f) = a.failures().next() {
            panic!("{}: {} ({})", f.spec, f.check.name, f.check.detail);
        }
        let b = verify_suite(&options);
        assert_eq!(a.to_json_pretty(), b.to_json_pretty());
    }
}
