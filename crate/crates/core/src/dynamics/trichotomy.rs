//! Long-run classification of density-dependent orbits: extinction, a
//! unique positive fixed point, or unbounded growth.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::bounds::upper_bound_vector;
use super::simulate::{simulate_unchecked, sup_distance, sup_norm, SimulationOptions};
use super::step::{check_state, step_unchecked};
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::spectral::{perron_vector, r0};

/// Orbits ending at or below this sup-norm count as extinct.
pub const EXTINCTION_NORM: f64 = 1e-8;
/// Limits from different starts must agree to this relative distance.
pub const AGREEMENT_TOLERANCE: f64 = 1e-6;
/// A fixed point must satisfy `|step(q) - q| <= this * (1 + |q|)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
/// `|R0 - 1|` below this gives an inconclusive report.
pub const NEAR_THRESHOLD: f64 = 1e-6;
/// Relative floor for strict positivity.
pub const STRICT_MARGIN: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Extinction,
    PositiveFixedPoint {
        q: Vec<f64>,
    },
    Unbounded,
    /// Reproduction number too close to 1, or orbits that disagree on the
    /// outcome.
    Inconclusive,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Extinction => "extinction",
            Outcome::PositiveFixedPoint { .. } => "positive_fixed_point",
            Outcome::Unbounded => "unbounded",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitFate {
    Extinct,
    Positive,
    /// Converged to a nonzero limit with a zero coordinate.
    Boundary,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitEvidence {
    pub start: Vec<f64>,
    pub limit: Vec<f64>,
    pub steps: usize,
    pub fate: OrbitFate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EscapeCheck {
    pub epsilon: f64,
    pub lambda: f64,
    /// `min_i (step(x0) - x0)_i` with `x0 = epsilon v`.
    pub min_gain: f64,
    pub passed: bool,
    /// Number of steps over which `step^k(x0)` was checked to be
    /// nondecreasing.
    pub monotone_steps: usize,
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    NearThreshold {
        r0: f64,
    },
    MixedFates,
    BoundaryLimit {
        start: usize,
    },
    DisagreeingLimits {
        start: usize,
        distance: f64,
    },
    LargeResidual {
        residual: f64,
    },
    /// The outcome contradicts the reproduction number at the origin.
    ThresholdMismatch {
        r0: f64,
    },
    EscapeFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrichotomyReport {
    pub outcome: Outcome,
    pub r0_at_origin: f64,
    pub residual: Option<f64>,
    pub orbits: Vec<OrbitEvidence>,
    pub escape: Option<EscapeCheck>,
    pub issues: Vec<Issue>,
}

impl TrichotomyReport {
    /// No issue was flagged.
    pub fn is_consistent(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn fixed_point(&self) -> Option<&[f64]> {
        match &self.outcome {
            Outcome::PositiveFixedPoint { q } => Some(q),
            _ => None,
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serialisable")
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        crate::experiment::write_text_atomic(path, &self.to_json_pretty())
    }
}

fn check_dynamics_preconditions(spec: &ModelSpec) -> Result<()> {
    spec.ensure_valid()?;
    if !spec.is_density_dependent() {
        return Err(Error::NotDensityDependent);
    }
    if !spec.has_interior_allocation() {
        return Err(Error::BoundaryAllocation);
    }
    Ok(())
}

fn fate(trajectory: &super::Trajectory) -> Option<OrbitFate> {
    let x = trajectory.final_state();
    let norm = sup_norm(x);
    if trajectory.overflowed {
        Some(OrbitFate::Unbounded)
    } else if norm <= EXTINCTION_NORM {
        Some(OrbitFate::Extinct)
    } else if !trajectory.converged {
        None
    } else if x.iter().all(|&v| v > STRICT_MARGIN * norm) {
        Some(OrbitFate::Positive)
    } else {
        Some(OrbitFate::Boundary)
    }
}

/// Runs every start in `initial_set` to its limit and reaches a verdict by
/// consensus. Orbits run in parallel; evidence keeps the input order.
pub fn find_fixed_point(
    spec: &ModelSpec,
    initial_set: &[Vec<f64>],
    tol: f64,
    max_steps: usize,
) -> Result<TrichotomyReport> {
    check_dynamics_preconditions(spec)?;
    if initial_set.is_empty() {
        return Err(Error::Config("initial set is empty".into()));
    }
    for x in initial_set {
        check_state(spec, x)?;
        if x.iter().all(|&v| v == 0.0) {
            return Err(Error::Config("initial states must be nonzero".into()));
        }
    }
    let r0_at_origin = r0(spec)?;
    let mut issues = Vec::new();
    if (r0_at_origin - 1.0).abs() < NEAR_THRESHOLD {
        issues.push(Issue::NearThreshold { r0: r0_at_origin });
        return Ok(TrichotomyReport {
            outcome: Outcome::Inconclusive,
            r0_at_origin,
            residual: None,
            orbits: Vec::new(),
            escape: None,
            issues,
        });
    }

    let options = SimulationOptions {
        max_steps,
        tol,
        record_every: None,
    };
    let trajectories: Vec<_> = initial_set
        .par_iter()
        .map(|x0| simulate_unchecked(spec, x0, options))
        .collect();
    let mut orbits = Vec::with_capacity(trajectories.len());
    for (start, t) in trajectories.iter().enumerate() {
        let fate = fate(t).ok_or(Error::OrbitNotSettled {
            start,
            steps: t.steps_taken,
        })?;
        orbits.push(OrbitEvidence {
            start: initial_set[start].clone(),
            limit: t.final_state().to_vec(),
            steps: t.steps_taken,
            fate,
        });
    }

    for (start, orbit) in orbits.iter().enumerate() {
        if orbit.fate == OrbitFate::Boundary {
            issues.push(Issue::BoundaryLimit { start });
        }
    }
    let first = orbits[0].fate;
    let mut residual = None;
    let outcome = if orbits.iter().any(|o| o.fate != first) {
        issues.push(Issue::MixedFates);
        Outcome::Inconclusive
    } else {
        match first {
            OrbitFate::Extinct => Outcome::Extinction,
            OrbitFate::Unbounded => Outcome::Unbounded,
            OrbitFate::Boundary => Outcome::Inconclusive,
            OrbitFate::Positive => {
                let q = orbits[0].limit.clone();
                for (start, orbit) in orbits.iter().enumerate().skip(1) {
                    let scale = sup_norm(&q).max(sup_norm(&orbit.limit));
                    let distance = sup_distance(&q, &orbit.limit) / scale;
                    if distance > AGREEMENT_TOLERANCE {
                        issues.push(Issue::DisagreeingLimits { start, distance });
                    }
                }
                let r = sup_distance(&step_unchecked(spec, &q), &q);
                if r > RESIDUAL_TOLERANCE * (1.0 + sup_norm(&q)) {
                    issues.push(Issue::LargeResidual { residual: r });
                }
                residual = Some(r);
                Outcome::PositiveFixedPoint { q }
            }
        }
    };

    let expected_growth = r0_at_origin > 1.0;
    let matches = match &outcome {
        Outcome::Extinction => !expected_growth,
        Outcome::PositiveFixedPoint { .. } => expected_growth,
        _ => false,
    };
    if !matches {
        issues.push(Issue::ThresholdMismatch { r0: r0_at_origin });
    }

    Ok(TrichotomyReport {
        outcome,
        r0_at_origin,
        residual,
        orbits,
        escape: None,
        issues,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrichotomyConfig {
    pub seed: u64,
    /// Random log-uniform starts added to the scaled unit vectors.
    pub random_starts: usize,
    pub tol: f64,
    pub max_steps: usize,
    /// `|epsilon v| = epsilon_scale * |a|` for the escape check, with `a`
    /// the order-interval bound.
    pub epsilon_scale: f64,
    /// Steps over which the orbit from `epsilon v` must be nondecreasing.
    pub monotone_steps: usize,
}

impl Default for TrichotomyConfig {
    fn default() -> Self {
        TrichotomyConfig {
            seed: 0,
            random_starts: 6,
            tol: super::CONVERGENCE_TOLERANCE,
            max_steps: super::DEFAULT_MAX_STEPS,
            epsilon_scale: 1e-6,
            monotone_steps: 200,
        }
    }
}

/// Uniform on `log x` over `[1e-3, 1e3]`.
pub(crate) fn log_uniform(rng: &mut impl Rng) -> f64 {
    10f64.powf(rng.random_range(-3.0..=3.0))
}

pub(crate) fn log_uniform_vector(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| log_uniform(rng)).collect()
}

/// Unit vectors scaled by `1e-3`, `1` and `1e3`, then `random` log-uniform
/// positive vectors.
pub fn default_initial_set(dim: usize, random: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(3 * dim + random);
    for k in 0..dim {
        for scale in [1e-3, 1.0, 1e3] {
            let mut x = vec![0.0; dim];
            x[k] = scale;
            out.push(x);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    out.extend((0..random).map(|_| log_uniform_vector(&mut rng, dim)));
    out
}

/// Checks that a small multiple of the Perron vector of the linearization
/// is pushed strictly upward, and that its orbit keeps increasing.
pub fn escape_check(spec: &ModelSpec, epsilon_scale: f64, monotone_steps: usize) -> Result<EscapeCheck> {
    check_dynamics_preconditions(spec)?;
    let (lambda, v) = perron_vector(&spec.linearization()?)?;
    let bound = sup_norm(&upper_bound_vector(spec)?);
    let epsilon = epsilon_scale * bound;
    let x0: Vec<f64> = v.iter().map(|vi| epsilon * vi).collect();
    let x1 = step_unchecked(spec, &x0);
    let scale = sup_norm(&x0);
    let min_gain = x1
        .iter()
        .zip(&x0)
        .map(|(a, b)| a - b)
        .fold(f64::INFINITY, f64::min);
    let passed = min_gain > STRICT_MARGIN * scale;

    let mut monotone = true;
    let mut x = x0;
    for _ in 0..monotone_steps {
        let y = step_unchecked(spec, &x);
        if y.iter().zip(&x).any(|(a, b)| *a < b - 1e-12 * b.abs()) {
            monotone = false;
            break;
        }
        x = y;
    }
    Ok(EscapeCheck {
        epsilon,
        lambda,
        min_gain,
        passed,
        monotone_steps,
        monotone,
    })
}

/// [`find_fixed_point`] over [`default_initial_set`], plus the escape check
/// when the reproduction number exceeds 1.
pub fn classify_trichotomy(spec: &ModelSpec, config: TrichotomyConfig) -> Result<TrichotomyReport> {
    check_dynamics_preconditions(spec)?;
    let starts = default_initial_set(spec.dim(), config.random_starts, config.seed);
    let mut report = find_fixed_point(spec, &starts, config.tol, config.max_steps)?;
    if matches!(report.outcome, Outcome::Inconclusive) && report.orbits.is_empty() {
        return Ok(report);
    }
    if report.r0_at_origin > 1.0 {
        let escape = escape_check(spec, config.epsilon_scale, config.monotone_steps)?;
        if !(escape.passed && escape.monotone) {
            report.issues.push(Issue::EscapeFailed);
        }
        report.escape = Some(escape);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IsolatedSpec, TransitionRule as R};

    fn bh_pair(f2: f64) -> ModelSpec {
        IsolatedSpec::new(vec![R::beverton_holt(0.5, 1.0); 2], vec![f2]).into()
    }

    #[test]
    fn decline_is_extinction() {
        let report = classify_trichotomy(&bh_pair(0.8), TrichotomyConfig::default()).unwrap();
        assert_eq!(report.outcome, Outcome::Extinction);
        assert!(report.is_consistent(), "{:?}", report.issues);
        assert_eq!(report.orbits.len(), 12);
        assert!(report
            .orbits
            .iter()
            .all(|o| sup_norm(&o.limit) <= EXTINCTION_NORM));
    }

    #[test]
    fn growth_has_unique_positive_fixed_point() {
        let spec = bh_pair(8.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let starts: Vec<Vec<f64>> = (0..10).map(|_| log_uniform_vector(&mut rng, 2)).collect();
        let report = find_fixed_point(&spec, &starts, 1e-12, 50_000).unwrap();
        assert!(report.is_consistent(), "{:?}", report.issues);
        let q = report.fixed_point().unwrap();
        // f y^2 + y + 0.5 (1 - f) = 0 with f = 8
        let y = (-1.0 + (1.0f64 + 4.0 * 8.0 * 3.5).sqrt()) / 16.0;
        assert!((q[1] - y).abs() < 1e-9 && (q[0] - 8.0 * y).abs() < 1e-8);
    }

    #[test]
    fn escape_from_origin() {
        let report = classify_trichotomy(&bh_pair(8.0), TrichotomyConfig::default()).unwrap();
        let escape = report.escape.unwrap();
        assert!(escape.passed && escape.monotone);
        assert!(escape.lambda > 1.0);
    }

    #[test]
    fn coupled_decline() {
        let member = |f: f64| IsolatedSpec::new(vec![R::beverton_holt(0.5, 1.0); 3], vec![0.5, f]);
        let spec = ModelSpec::single_egg(member(1.0), member(0.6), 0.4);
        assert!(r0(&spec).unwrap() < 1.0);
        let report = classify_trichotomy(&spec, TrichotomyConfig::default()).unwrap();
        assert_eq!(report.outcome, Outcome::Extinction);
    }

    #[test]
    fn near_threshold_is_inconclusive() {
        let report = classify_trichotomy(&bh_pair(1.0 + 1e-8), TrichotomyConfig::default()).unwrap();
        assert_eq!(report.outcome, Outcome::Inconclusive);
        assert!(matches!(report.issues[0], Issue::NearThreshold { .. }));
    }

    #[test]
    fn preconditions() {
        let linear: ModelSpec = IsolatedSpec::linear(&[0.5, 0.5], &[8.0]).into();
        assert!(matches!(
            classify_trichotomy(&linear, TrichotomyConfig::default()),
            Err(Error::NotDensityDependent)
        ));
        let member = IsolatedSpec::new(vec![R::beverton_holt(0.5, 1.0); 2], vec![3.0]);
        let edge = ModelSpec::single_egg(member.clone(), member, 1.0);
        assert!(matches!(
            classify_trichotomy(&edge, TrichotomyConfig::default()),
            Err(Error::BoundaryAllocation)
        ));
        assert!(find_fixed_point(&bh_pair(8.0), &[], 1e-12, 10).is_err());
        assert!(find_fixed_point(&bh_pair(8.0), &[vec![0.0, 0.0]], 1e-12, 10).is_err());
    }

    #[test]
    fn unsettled_orbit_is_an_error() {
        let err = find_fixed_point(&bh_pair(8.0), &[vec![1.0, 1.0]], 1e-12, 3).unwrap_err();
        assert!(matches!(err, Error::OrbitNotSettled { start: 0, steps: 3 }));
    }

    #[test]
    fn initial_set_shape() {
        let set = default_initial_set(3, 4, 1);
        assert_eq!(set.len(), 13);
        assert_eq!(set[2], vec![1e3, 0.0, 0.0]);
        assert!(set[9..].iter().flatten().all(|&v| (1e-3..=1e3).contains(&v)));
        assert_eq!(set, default_initial_set(3, 4, 1));
    }
}
