use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::step::{check_state, step_unchecked};
use crate::error::{Error, Result};
use crate::model::ModelSpec;

pub const DEFAULT_MAX_STEPS: usize = 50_000;
/// Sup-norm relative change at which an orbit counts as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-12;
/// Norms above this are treated as escape to infinity.
pub const OVERFLOW_NORM: f64 = 1e300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationOptions {
    pub max_steps: usize,
    pub tol: f64,
    /// Keep every `k`-th state. `None` keeps only the first and last.
    pub record_every: Option<usize>,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            max_steps: DEFAULT_MAX_STEPS,
            tol: CONVERGENCE_TOLERANCE,
            record_every: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    /// `(step, state)` pairs, always starting with step 0 and ending with
    /// the last state computed.
    pub states: Vec<(usize, Vec<f64>)>,
    pub converged: bool,
    pub limit: Option<Vec<f64>>,
    pub steps_taken: usize,
    /// The orbit left the representable range.
    pub overflowed: bool,
    /// Sup-norm relative change over the last step.
    pub final_change: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        &self.states.last().expect("initial state recorded").1
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let dim = self.states.first().map_or(0, |(_, x)| x.len());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["step".to_string()];
        header.extend((1..=dim).map(|k| format!("x{k}")));
        w.write_record(&header)?;
        for (step, x) in &self.states {
            let mut row = vec![step.to_string()];
            row.extend(x.iter().map(|v| format!("{v:.16e}")));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        crate::experiment::write_atomic(path, |f| self.write_csv(f))
    }
}

pub(crate) fn sup_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub(crate) fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (u, v)| m.max((u - v).abs()))
}

/// Iterates the model from `x0` until the relative change drops to
/// `options.tol` or `options.max_steps` is reached. A state whose norm
/// underflows to below the smallest normal float is flushed to zero.
pub fn simulate(spec: &ModelSpec, x0: &[f64], options: SimulationOptions) -> Result<Trajectory> {
    spec.ensure_valid()?;
    check_state(spec, x0)?;
    if options.record_every == Some(0) {
        return Err(Error::Config("record_every must be positive".into()));
    }
    Ok(simulate_unchecked(spec, x0, options))
}

pub(crate) fn simulate_unchecked(spec: &ModelSpec, x0: &[f64], options: SimulationOptions) -> Trajectory {
    let mut states = vec![(0, x0.to_vec())];
    let mut x = x0.to_vec();
    let mut converged = false;
    let mut overflowed = false;
    let mut final_change = f64::NAN;
    let mut steps_taken = 0;

    for k in 1..=options.max_steps {
        let mut y = step_unchecked(spec, &x);
        steps_taken = k;
        let norm = sup_norm(&y);
        if !norm.is_finite() || norm > OVERFLOW_NORM {
            overflowed = true;
            x = y;
            break;
        }
        if norm < f64::MIN_POSITIVE {
            y.iter_mut().for_each(|v| *v = 0.0);
        }
        let change = sup_distance(&y, &x);
        final_change = if norm > 0.0 { change / norm } else { 0.0 };
        x = y;
        if options.record_every.is_some_and(|s| k % s == 0) {
            states.push((k, x.clone()));
        }
        if change <= options.tol * norm {
            converged = true;
            break;
        }
    }
    if states.last().map(|(k, _)| *k) != Some(steps_taken) {
        states.push((steps_taken, x.clone()));
    }
    Trajectory {
        limit: converged.then(|| x.clone()),
        states,
        converged,
        steps_taken,
        overflowed,
        final_change,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IsolatedSpec, TransitionRule as R};

    fn bh_pair(f2: f64) -> ModelSpec {
        IsolatedSpec::new(vec![R::beverton_holt(0.5, 1.0); 2], vec![f2]).into()
    }

    /// Positive fixed point of the two-stage Beverton–Holt model with
    /// `b = 0.5`, `c = 1`: eliminating `x1 = f x2` from
    /// `x2 = s(f x2) + s(x2)` gives a quadratic in `x2`.
    fn bh_pair_fixed_point(f: f64) -> (f64, f64) {
        // 1 = 0.5 f / (1 + f y) + 0.5 / (1 + y)  =>  f y^2 + y + 0.5 (1 - f) = 0
        let (a, b, c) = (f, 1.0, 0.5 * (1.0 - f));
        let y = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
        (f * y, y)
    }

    #[test]
    fn zero_start_converges_immediately() {
        let t = simulate(&bh_pair(8.0), &[0.0, 0.0], SimulationOptions::default()).unwrap();
        assert!(t.converged);
        assert_eq!(t.steps_taken, 1);
        assert_eq!(t.limit, Some(vec![0.0, 0.0]));
    }

    #[test]
    fn growth_converges_to_positive_limit() {
        let t = simulate(&bh_pair(1.6), &[1.0, 1.0], SimulationOptions::default()).unwrap();
        assert!(t.converged);
        let q = t.limit.unwrap();
        let (q1, q2) = bh_pair_fixed_point(1.6);
        assert!((q[0] - q1).abs() < 1e-9 && (q[1] - q2).abs() < 1e-9, "{q:?}");
    }

    #[test]
    fn decline_goes_extinct() {
        let opts = SimulationOptions {
            max_steps: 2000,
            ..Default::default()
        };
        let t = simulate(&bh_pair(0.8), &[1.0, 1.0], opts).unwrap();
        assert!(sup_norm(t.final_state()) <= 1e-8);
    }

    #[test]
    fn linear_growth_overflows() {
        let spec: ModelSpec = IsolatedSpec::linear(&[0.5, 0.5], &[8.0]).into();
        let t = simulate(&spec, &[1.0, 1.0], SimulationOptions::default()).unwrap();
        assert!(t.overflowed && !t.converged);
    }

    #[test]
    fn strided_history_and_csv() {
        let opts = SimulationOptions {
            max_steps: 10,
            tol: 0.0,
            record_every: Some(5),
        };
        let t = simulate(&bh_pair(8.0), &[1.0, 1.0], opts).unwrap();
        let steps: Vec<usize> = t.states.iter().map(|(k, _)| *k).collect();
        assert_eq!(steps, vec![0, 5, 10]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("step,x1,x2\n0,1.0000000000000000e0,"));
        assert_eq!(text.lines().count(), 4);
    }
}
