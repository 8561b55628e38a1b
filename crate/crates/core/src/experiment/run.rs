use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{Grid, ScenarioConfig, Task};
use super::output::{configure_threads, format_number, write_text_atomic};
use super::sweep::{sensitivity_table, sweep_phi, sweep_phi2, SweepTable};
use super::verify::{verify_suite, VerifyOptions};
use crate::dynamics::{
    classify_trichotomy, find_fixed_point, simulate, SimulationOptions, TrichotomyConfig,
    CONVERGENCE_TOLERANCE, DEFAULT_MAX_STEPS,
};
use crate::error::Result;
use crate::model::ModelSpec;
use crate::spectral::{classify, member_r0s, r0, Regime, DEFAULT_GRID_RESOLUTION};

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub task: Task,
    pub spec_hash: Option<String>,
    pub wall_time_s: f64,
    /// All internal checks held.
    pub passed: bool,
    /// Human-readable result lines.
    pub lines: Vec<String>,
    pub results: Value,
    pub outputs: Vec<PathBuf>,
}

fn vector(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|&v| format_number(v)).collect();
    format!("[{}]", parts.join(", "))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

fn save_table(table: &SweepTable, path: &Path) -> Result<()> {
    if is_json(path) {
        write_text_atomic(path, &table.to_json_pretty())
    } else {
        table.save_csv(path)
    }
}

fn save_json(value: &Value, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_text_atomic(path, &text)
}

struct Outcome {
    passed: bool,
    lines: Vec<String>,
    results: Value,
}

fn table_outcome(table: SweepTable, output: Option<&Path>) -> Result<Outcome> {
    if let Some(p) = output {
        save_table(&table, p)?;
    }
    let mut lines = vec![format!("rows = {}", table.rows.len())];
    if let Some(max) = table.values().into_iter().reduce(f64::max) {
        lines.push(format!("max = {}", format_number(max)));
    }
    for c in &table.checks {
        lines.push(format!(
            "check {}: {} ({})",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.detail
        ));
    }
    Ok(Outcome {
        passed: table.passed(),
        lines,
        results: serde_json::to_value(&table)?,
    })
}

fn grid_values(grid: &Option<Grid>) -> Result<Vec<f64>> {
    grid.clone()
        .unwrap_or(Grid::Points(DEFAULT_GRID_RESOLUTION))
        .values()
}

fn run_r0(spec: &ModelSpec, output: Option<&Path>) -> Result<Outcome> {
    let value = r0(spec)?;
    let regime = Regime::from_r0(value);
    let mut lines = vec![
        format!("R0 = {}", format_number(value)),
        format!("regime: {regime}"),
    ];
    let mut results = json!({ "r0": value, "regime": regime });
    if let Some((rs, rr)) = member_r0s(spec)? {
        lines.push(format!("R0 migrant = {}", format_number(rs)));
        lines.push(format!("R0 resident = {}", format_number(rr)));
        results["r0_migrant"] = json!(rs);
        results["r0_resident"] = json!(rr);
    }
    if let Some(p) = output {
        save_json(&results, p)?;
    }
    Ok(Outcome {
        passed: true,
        lines,
        results,
    })
}

fn run_classify(config: &ScenarioConfig, spec: &ModelSpec, output: Option<&Path>) -> Result<Outcome> {
    let growth = classify(spec)?;
    let mut lines = vec![
        format!("lambda = {}", format_number(growth.lambda)),
        format!("R0 = {}", format_number(growth.r0)),
        format!("regime: {}", growth.regime),
    ];
    let mut results = json!({ "growth": growth });
    let mut passed = true;
    if spec.is_density_dependent() && spec.has_interior_allocation() {
        let tol = config.tol.unwrap_or(CONVERGENCE_TOLERANCE);
        let max_steps = config.steps.unwrap_or(DEFAULT_MAX_STEPS);
        let report = match &config.initial {
            Some(starts) => find_fixed_point(spec, starts, tol, max_steps)?,
            None => classify_trichotomy(
                spec,
                TrichotomyConfig {
                    seed: config.seed.unwrap_or(0),
                    random_starts: config
                        .samples
                        .unwrap_or(TrichotomyConfig::default().random_starts),
                    tol,
                    max_steps,
                    ..Default::default()
                },
            )?,
        };
        lines.push(format!("outcome: {}", report.outcome.label()));
        if let Some(q) = report.fixed_point() {
            lines.push(format!("q = {}", vector(q)));
        }
        if let Some(r) = report.residual {
            lines.push(format!("residual = {}", format_number(r)));
        }
        for issue in &report.issues {
            lines.push(format!("issue: {}", serde_json::to_string(issue)?));
        }
        passed = report.is_consistent();
        results["trichotomy"] = serde_json::to_value(&report)?;
    }
    if let Some(p) = output {
        save_json(&results, p)?;
    }
    Ok(Outcome {
        passed,
        lines,
        results,
    })
}

fn run_simulate(config: &ScenarioConfig, spec: &ModelSpec, output: Option<&Path>) -> Result<Outcome> {
    let x0 = match config.initial.as_ref().and_then(|v| v.first()) {
        Some(x) => x.clone(),
        None => vec![1.0; spec.dim()],
    };
    let options = SimulationOptions {
        max_steps: config.steps.unwrap_or(DEFAULT_MAX_STEPS),
        tol: config.tol.unwrap_or(CONVERGENCE_TOLERANCE),
        record_every: config.record_every.or(output.map(|_| 1)),
    };
    let t = simulate(spec, &x0, options)?;
    if let Some(p) = output {
        if is_json(p) {
            write_text_atomic(p, &serde_json::to_string_pretty(&t)?)?;
        } else {
            t.save_csv(p)?;
        }
    }
    let lines = vec![
        format!("steps = {}", t.steps_taken),
        format!("converged: {}", t.converged),
        format!("overflowed: {}", t.overflowed),
        format!("final = {}", vector(t.final_state())),
    ];
    let results = json!({
        "steps_taken": t.steps_taken,
        "converged": t.converged,
        "overflowed": t.overflowed,
        "final_state": t.final_state(),
    });
    Ok(Outcome {
        passed: true,
        lines,
        results,
    })
}

fn run_verify(config: &ScenarioConfig, output: Option<&Path>) -> Result<Outcome> {
    let defaults = VerifyOptions::default();
    let options = VerifyOptions {
        seed: config.seed.unwrap_or(defaults.seed),
        samples: config.samples.unwrap_or(defaults.samples),
        random_specs: defaults.random_specs,
    };
    let report = verify_suite(&options);
    if let Some(p) = output {
        write_text_atomic(p, &report.to_json_pretty())?;
    }
    let mut lines = vec![format!(
        "checks: {} passed, {} failed",
        report.passed, report.failed
    )];
    for f in report.failures() {
        lines.push(format!("FAIL {} {}: {}", f.spec, f.check.name, f.check.detail));
    }
    lines.push(if report.all_passed() { "pass" } else { "fail" }.to_string());
    Ok(Outcome {
        passed: report.all_passed(),
        lines,
        results: json!({ "passed": report.passed, "failed": report.failed }),
    })
}

/// Validates `config`, runs its task and writes any requested output.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunSummary> {
    let start = Instant::now();
    config.validate()?;
    configure_threads(config.threads)?;
    let task = config.task()?;
    let spec = config.resolve_spec()?;
    let output = config.output.as_deref();
    let need = || spec.as_ref().expect("validated: spec present");

    let outcome = match task {
        Task::R0 => run_r0(need(), output)?,
        Task::Classify => run_classify(config, need(), output)?,
        Task::Simulate => run_simulate(config, need(), output)?,
        Task::SweepPhi => {
            let ModelSpec::SingleEgg(s) = need() else {
                unreachable!("validated")
            };
            table_outcome(sweep_phi(s, &grid_values(&config.grid)?)?, output)?
        }
        Task::SweepPhi2 => {
            let ModelSpec::TwoEgg(s) = need() else {
                unreachable!("validated")
            };
            let grid_s = grid_values(&config.grid)?;
            let grid_r = match &config.grid_r {
                Some(g) => g.values()?,
                None => grid_s.clone(),
            };
            table_outcome(sweep_phi2(s, &grid_s, &grid_r)?, output)?
        }
        Task::Sensitivity => {
            let spec = need();
            let params = config.param_handles(spec)?;
            let table = sensitivity_table(spec, &params, config.h.unwrap_or(1e-6))?;
            let mut outcome = table_outcome(table.clone(), output)?;
            outcome.lines.splice(
                0..0,
                table.rows.iter().map(|r| match (r.value, &r.note) {
                    (Some(v), _) => format!(
                        "d R0 / d {} = {}",
                        r.label.as_deref().unwrap_or(""),
                        format_number(v)
                    ),
                    (None, note) => format!(
                        "d R0 / d {}: {}",
                        r.label.as_deref().unwrap_or(""),
                        note.as_deref().unwrap_or("unavailable")
                    ),
                }),
            );
            outcome
        }
        Task::Verify => run_verify(config, output)?,
    };

    Ok(RunSummary {
        task,
        spec_hash: spec.as_ref().map(ModelSpec::digest),
        wall_time_s: start.elapsed().as_secs_f64(),
        passed: outcome.passed,
        lines: outcome.lines,
        results: outcome.results,
        outputs: output.map(Path::to_path_buf).into_iter().collect(),
    })
}
