//! Scenario files.
//!
//! ```json
//! {
//!   "spec_path": "specs/two_egg.json",
//!   "task": "sweep_phi2",
//!   "grid": 101,
//!   "output": "surface.csv"
//! }
//! ```
//!
//! The spec is given inline under `spec` or by `spec_path` (relative to the
//! scenario file). Grids are a point count over `[0, 1]` or an explicit list.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::sweep::unit_grid;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::spectral::ParamHandle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    R0,
    Classify,
    Simulate,
    SweepPhi,
    SweepPhi2,
    Sensitivity,
    Verify,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::R0 => "r0",
            Task::Classify => "classify",
            Task::Simulate => "simulate",
            Task::SweepPhi => "sweep_phi",
            Task::SweepPhi2 => "sweep_phi2",
            Task::Sensitivity => "sensitivity",
            Task::Verify => "verify",
        }
    }

    fn needs_spec(&self) -> bool {
        !matches!(self, Task::Verify)
    }

    fn randomized(&self) -> bool {
        matches!(self, Task::Classify | Task::Verify)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Points(usize),
    Values(Vec<f64>),
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            Grid::Points(n) => unit_grid(*n),
            Grid::Values(v) if v.is_empty() => Err(Error::Config("grid is empty".into())),
            Grid::Values(v) => Ok(v.clone()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec_path: Option<PathBuf>,
    pub task: Option<Task>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Allocation grid (`phi` or `phi_s`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    /// `phi_r` grid for two-pool sweeps; defaults to `grid`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_r: Option<Grid>,
    /// Overrides `phi` (single pool) or `[phi_s, phi_r]` (two pools).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<f64>>,
    /// Starting states; `simulate` uses the first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_every: Option<usize>,
    /// Parameter names for `sensitivity`; all parameters by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<String>>,
    /// Relative finite-difference step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Property samples (`verify`) or random starts (`classify`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl ScenarioConfig {
    pub fn new(task: Task) -> Self {
        ScenarioConfig {
            task: Some(task),
            ..Default::default()
        }
    }

    /// Reads a scenario file. A relative `spec_path` or `output` is resolved
    /// against the file's directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: ScenarioConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut config.spec_path, &mut config.output].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    pub fn task(&self) -> Result<Task> {
        self.task
            .ok_or_else(|| Error::Config("`task` is required".into()))
    }

    /// The spec with any `phi` override applied.
    pub fn resolve_spec(&self) -> Result<Option<ModelSpec>> {
        let mut spec = match (&self.spec, &self.spec_path) {
            (Some(_), Some(_)) => return Err(Error::Config("give `spec` or `spec_path`, not both".into())),
            (Some(s), None) => s.clone(),
            (None, Some(p)) => ModelSpec::from_path(p)?,
            (None, None) => return Ok(None),
        };
        if let Some(phi) = &self.phi {
            match (&mut spec, phi.as_slice()) {
                (ModelSpec::SingleEgg(s), [p]) => s.phi = *p,
                (ModelSpec::TwoEgg(s), [ps, pr]) => {
                    s.phi_s = *ps;
                    s.phi_r = *pr;
                }
                (s, _) => {
                    return Err(Error::Config(format!(
                        "`phi` with {} values does not fit a {} spec",
                        phi.len(),
                        s.kind()
                    )))
                }
            }
        }
        Ok(Some(spec))
    }

    pub fn param_handles(&self, spec: &ModelSpec) -> Result<Vec<ParamHandle>> {
        match &self.params {
            None => Ok(ParamHandle::all_for(spec)),
            Some(names) => names.iter().map(|n| n.parse()).collect(),
        }
    }

    /// Field-level checks. All problems are reported together.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let task = match self.task {
            Some(t) => Some(t),
            None => {
                problems.push("`task` is required".to_string());
                None
            }
        };
        match self.resolve_spec() {
            Ok(Some(spec)) => {
                let report = spec.validate();
                if !report.is_valid() {
                    problems.push(format!("spec: {report}"));
                }
                if let Some(t) = task {
                    let needed = match t {
                        Task::SweepPhi => Some("single_egg"),
                        Task::SweepPhi2 => Some("two_egg"),
                        _ => None,
                    };
                    if let Some(kind) = needed.filter(|k| *k != spec.kind()) {
                        problems.push(format!(
                            "task `{}` needs a {kind} spec, got {}",
                            t.name(),
                            spec.kind()
                        ));
                    }
                    if let (Task::Simulate, Some(x)) = (t, self.initial.as_ref().and_then(|v| v.first())) {
                        if x.len() != spec.dim() {
                            problems.push(format!(
                                "initial state has {} entries, spec needs {}",
                                x.len(),
                                spec.dim()
                            ));
                        }
                    }
                    if t == Task::Sensitivity {
                        if let Err(e) = self.param_handles(&spec) {
                            problems.push(e.to_string());
                        }
                    }
                }
            }
            Ok(None) if task.is_some_and(|t| t.needs_spec()) => {
                problems.push("`spec` or `spec_path` is required".into())
            }
            Ok(None) => {}
            Err(e) => problems.push(e.to_string()),
        }
        if task.is_some_and(|t| t.randomized()) && self.seed.is_none() {
            problems.push("`seed` is required for randomized tasks".into());
        }
        for (name, grid) in [("grid", &self.grid), ("grid_r", &self.grid_r)] {
            if let Some(g) = grid {
                match g.values() {
                    Ok(v) if v.iter().any(|p| !(0.0..=1.0).contains(p)) => {
                        problems.push(format!("`{name}` values must lie in [0, 1]"))
                    }
                    Ok(_) => {}
                    Err(e) => problems.push(format!("`{name}`: {e}")),
                }
            }
        }
        if self.tol.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
            problems.push("`tol` must be a nonnegative number".into());
        }
        if self.h.is_some_and(|h| !(h.is_finite() && h > 0.0)) {
            problems.push("`h` must be positive".into());
        }
        if self.steps == Some(0) || self.record_every == Some(0) || self.threads == Some(0) {
            problems.push("`steps`, `record_every` and `threads` must be positive".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_inline_spec() {
        let text = r#"{
            "task": "r0",
            "spec": {"kind": "isolated", "migrant": {"transitions": [{"const": 0.5}, {"const": 0.5}], "fecundities": [2.0]}}
        }"#;
        let c: ScenarioConfig = serde_json::from_str(text).unwrap();
        assert_eq!(c.task, Some(Task::R0));
        c.validate().unwrap();
    }

    #[test]
    fn grid_forms() {
        let c: ScenarioConfig =
            serde_json::from_str(r#"{"task": "verify", "seed": 1, "grid": [0, 0.5, 1]}"#).unwrap();
        assert_eq!(c.grid.unwrap().values().unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(Grid::Points(3).values().unwrap(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn reports_every_problem() {
        let c: ScenarioConfig =
            serde_json::from_str(r#"{"task": "classify", "grid": [2.0], "tol": -1}"#).unwrap();
        let msg = c.validate().unwrap_err().to_string();
        for needle in ["spec_path", "seed", "[0, 1]", "tol"] {
            assert!(msg.contains(needle), "{msg}");
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<ScenarioConfig>(r#"{"task": "r0", "colour": 1}"#).is_err());
    }
}
