//! Tabulated reproduction numbers over allocation grids and parameter
//! lists.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::output::{format_exact, write_atomic};
use crate::error::{Error, Result};
use crate::model::{ModelSpec, SingleEggSpec, TwoEggSpec};
use crate::spectral::{
    member_r0s, predicted_maximum, r0_single_egg, relative_step, sensitivity, two_pool_r0, ParamHandle,
    PredictedMaximum, Regime, ARGMAX_TOLERANCE,
};

/// Largest allowed residual of a straight-line fit to a single-pool sweep.
pub const LINEAR_FIT_TOLERANCE: f64 = 1e-10;
/// Tolerance for the corner values of a two-pool sweep.
pub const CORNER_TOLERANCE: f64 = 1e-10;
/// Finite-difference derivatives at or above this count as nonnegative.
pub const SENSITIVITY_FLOOR: f64 = -1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableMetadata {
    pub task: String,
    pub spec_hash: String,
    pub grid: String,
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    /// Parameter name, for tables indexed by parameter.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub params: Vec<f64>,
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub metadata: TableMetadata,
    pub param_names: Vec<String>,
    pub value_name: String,
    pub rows: Vec<SweepRow>,
    pub checks: Vec<Check>,
}

impl SweepTable {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.value).collect()
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let labelled = self.rows.iter().any(|r| r.label.is_some());
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = Vec::new();
        if labelled {
            header.push("parameter");
        }
        header.extend(self.param_names.iter().map(String::as_str));
        header.extend([self.value_name.as_str(), "regime", "note"]);
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec: Vec<String> = Vec::new();
            if labelled {
                rec.push(row.label.clone().unwrap_or_default());
            }
            rec.extend(row.params.iter().map(|&p| format_exact(p)));
            rec.push(row.value.map(format_exact).unwrap_or_default());
            rec.push(row.regime.map(|r| r.to_string()).unwrap_or_default());
            rec.push(row.note.clone().unwrap_or_default());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, |f| self.write_csv(f))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("table is serialisable")
    }
}

fn metadata(task: &str, spec: &ModelSpec, grid: String) -> TableMetadata {
    TableMetadata {
        task: task.to_string(),
        spec_hash: spec.digest(),
        grid,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    match grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        Some(p) => Err(Error::Config(format!("{name} value {p} lies outside [0, 1]"))),
        None => Ok(()),
    }
}

/// `points` evenly spaced values covering `[0, 1]`.
pub fn unit_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::Config(format!(
            "a grid needs at least 2 points, got {points}"
        )));
    }
    Ok((0..points).map(|k| k as f64 / (points - 1) as f64).collect())
}

/// Maximum absolute residual of the least-squares line through `(x, y)`.
pub fn linear_fit_residual(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 3 {
        return 0.0;
    }
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    x.iter()
        .zip(y)
        .map(|(a, b)| (b - (my + slope * (a - mx))).abs())
        .fold(0.0, f64::max)
}

/// Single-pool reproduction number for each `phi` in `grid`.
pub fn sweep_phi(spec: &SingleEggSpec, grid: &[f64]) -> Result<SweepTable> {
    let model = ModelSpec::SingleEgg(spec.clone());
    model.ensure_valid()?;
    check_grid("phi", grid)?;
    let values: Vec<f64> = grid
        .iter()
        .map(|&phi| r0_single_egg(&SingleEggSpec { phi, ..spec.clone() }))
        .collect::<Result<_>>()?;
    let rows = grid
        .iter()
        .zip(&values)
        .map(|(&phi, &v)| SweepRow {
            label: None,
            params: vec![phi],
            value: Some(v),
            regime: Some(Regime::from_r0(v)),
            note: None,
        })
        .collect();

    let (rs, rr) = member_r0s(&model)?.expect("coupled spec");
    let residual = linear_fit_residual(grid, &values);
    let mut checks = vec![Check::new(
        "linear_in_phi",
        residual <= LINEAR_FIT_TOLERANCE,
        format!("max fit residual {residual:.3e}"),
    )];
    if let Some(max) = values.iter().copied().reduce(f64::max) {
        let tol = ARGMAX_TOLERANCE * max.abs().max(1.0);
        let at_max: Vec<f64> = grid
            .iter()
            .zip(&values)
            .filter(|(_, &v)| v >= max - tol)
            .map(|(&p, _)| p)
            .collect();
        let (passed, detail) = match predicted_maximum(rs, rr) {
            PredictedMaximum::Constant => (
                values
                    .iter()
                    .all(|v| (v - rs).abs() <= LINEAR_FIT_TOLERANCE * rs.max(1.0)),
                "equal members, constant".to_string(),
            ),
            p => {
                let edge = if p == PredictedMaximum::MigrantEdge {
                    1.0
                } else {
                    0.0
                };
                let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let end = if edge == 1.0 { hi } else { lo };
                (at_max == [end], format!("maximum at phi = {end}"))
            }
        };
        checks.push(Check::new("maximum_at_endpoint", passed, detail));
    }
    Ok(SweepTable {
        metadata: metadata("sweep_phi", &model, format!("{} points in [0, 1]", grid.len())),
        param_names: vec!["phi".into()],
        value_name: "r0".into(),
        rows,
        checks,
    })
}

/// Two-pool reproduction number over the product grid `grid_s x grid_r`,
/// with rows ordered by `phi_s` then `phi_r`.
pub fn sweep_phi2(spec: &TwoEggSpec, grid_s: &[f64], grid_r: &[f64]) -> Result<SweepTable> {
    let model = ModelSpec::TwoEgg(spec.clone());
    model.ensure_valid()?;
    check_grid("phi_s", grid_s)?;
    check_grid("phi_r", grid_r)?;
    let (rs, rr) = member_r0s(&model)?.expect("coupled spec");
    let rows: Vec<SweepRow> = grid_s
        .par_iter()
        .map(|&ps| {
            grid_r
                .iter()
                .map(|&pr| {
                    let v = two_pool_r0(rs, rr, ps, pr)?;
                    Ok(SweepRow {
                        label: None,
                        params: vec![ps, pr],
                        value: Some(v),
                        regime: Some(Regime::from_r0(v)),
                        note: None,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let near = |a: f64, b: f64| (a - b).abs() <= CORNER_TOLERANCE * b.abs().max(1.0);
    let corners = [
        ("corner_origin", 0.0, 0.0, (rs * rr).sqrt()),
        ("corner_migrant_only", 1.0, 0.0, rs),
        ("corner_resident_only", 0.0, 1.0, rr),
        ("corner_both", 1.0, 1.0, rs.max(rr)),
    ];
    let mut checks = Vec::new();
    for (name, ps, pr, expected) in corners {
        let v = two_pool_r0(rs, rr, ps, pr)?;
        checks.push(Check::new(
            name,
            near(v, expected),
            format!("value {} expected {}", format_exact(v), format_exact(expected)),
        ));
    }

    let max = rows
        .iter()
        .filter_map(|r| r.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let cut = max - ARGMAX_TOLERANCE * max.abs().max(1.0);
    let argmax: Vec<&[f64]> = rows
        .iter()
        .filter(|r| r.value.is_some_and(|v| v >= cut))
        .map(|r| r.params.as_slice())
        .collect();
    let edge_check = match predicted_maximum(rs, rr) {
        PredictedMaximum::Constant => Check::new(
            "constant_surface",
            rows.iter().all(|r| r.value.is_some_and(|v| near(v, rs))),
            "equal members".into(),
        ),
        PredictedMaximum::MigrantEdge if grid_s.contains(&1.0) => Check::new(
            "maximum_on_migrant_edge",
            near(max, rs) && argmax.iter().all(|p| p[0] == 1.0),
            format!("maximum {} on phi_s = 1", format_exact(max)),
        ),
        PredictedMaximum::ResidentEdge if grid_r.contains(&1.0) => Check::new(
            "maximum_on_resident_edge",
            near(max, rr) && argmax.iter().all(|p| p[1] == 1.0),
            format!("maximum {} on phi_r = 1", format_exact(max)),
        ),
        _ => Check::new(
            "maximum_below_member_bound",
            max <= rs.max(rr) * (1.0 + ARGMAX_TOLERANCE),
            "grid excludes the maximising edge".into(),
        ),
    };
    checks.push(edge_check);

    Ok(SweepTable {
        metadata: metadata(
            "sweep_phi2",
            &model,
            format!("{} x {} points in [0, 1]^2", grid_s.len(), grid_r.len()),
        ),
        param_names: vec!["phi_s".into(), "phi_r".into()],
        value_name: "r0".into(),
        rows,
        checks,
    })
}

/// Central-difference derivative of the reproduction number for each
/// parameter, with step `h` relative to the parameter value (floor `1e-9`).
/// Parameters that cannot be perturbed get a note instead of a value.
pub fn sensitivity_table(spec: &ModelSpec, params: &[ParamHandle], h: f64) -> Result<SweepTable> {
    spec.ensure_valid()?;
    let rows: Vec<SweepRow> = params
        .par_iter()
        .map(|&p| {
            let theta = p.value(spec)?;
            let row = match sensitivity(spec, p, relative_step(theta, h, 1e-9)) {
                Ok(d) => SweepRow {
                    label: Some(p.to_string()),
                    params: vec![theta],
                    value: Some(d),
                    regime: None,
                    note: None,
                },
                Err(Error::Perturbation { reason, .. }) => SweepRow {
                    label: Some(p.to_string()),
                    params: vec![theta],
                    value: None,
                    regime: None,
                    note: Some(reason),
                },
                Err(e) => return Err(e),
            };
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let negative = rows
        .iter()
        .filter(|r| r.value.is_some_and(|v| v < SENSITIVITY_FLOOR))
        .count();
    Ok(SweepTable {
        metadata: metadata(
            "sensitivity",
            spec,
            format!("{} parameters, h = {h:e}", params.len()),
        ),
        param_names: vec!["value".into()],
        value_name: "dr0".into(),
        rows,
        checks: vec![Check::new(
            "nonnegative_sensitivity",
            negative == 0,
            format!("{negative} negative derivatives"),
        )],
    })
}
