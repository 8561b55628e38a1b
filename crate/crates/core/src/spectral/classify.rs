use std::fmt;

use serde::Serialize;

use super::eigen::dominant_eigenvalue;
use super::r0::r0;
use crate::error::{Error, Result};
use crate::model::ModelSpec;

/// `|R0 - 1|` at or below this is reported as [`Regime::Threshold`].
pub const THRESHOLD_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    Decline,
    Threshold,
    Growth,
}

impl Regime {
    pub fn from_r0(r0: f64) -> Self {
        if (r0 - 1.0).abs() <= THRESHOLD_TOLERANCE {
            Regime::Threshold
        } else if r0 < 1.0 {
            Regime::Decline
        } else {
            Regime::Growth
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Decline => "Decline",
            Regime::Threshold => "Threshold",
            Regime::Growth => "Growth",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthClassification {
    /// Dominant eigenvalue of the low-density projection matrix.
    pub lambda: f64,
    pub r0: f64,
    pub regime: Regime,
}

/// Checks that `lambda` and `r0` fall in one of `r0 <= lambda < 1`,
/// `lambda = r0 = 1`, `1 < lambda <= r0`, within `tol`.
pub fn ordering_holds(lambda: f64, r0: f64, tol: f64) -> bool {
    let below = |a: f64, b: f64| a <= b + tol * b.abs().max(1.0);
    if (r0 - 1.0).abs() <= tol {
        (lambda - 1.0).abs() <= tol
    } else if r0 < 1.0 {
        below(r0, lambda) && lambda < 1.0 + tol
    } else {
        below(lambda, r0) && lambda > 1.0 - tol
    }
}

/// Dominant eigenvalue and reproduction number of the linearization, the
/// growth regime, and a consistency check between the two.
pub fn classify(spec: &ModelSpec) -> Result<GrowthClassification> {
    let lambda = dominant_eigenvalue(&spec.linearization()?)?;
    let r0 = r0(spec)?;
    if !ordering_holds(lambda, r0, THRESHOLD_TOLERANCE) {
        return Err(Error::OrderingViolation { lambda, r0 });
    }
    Ok(GrowthClassification {
        lambda,
        r0,
        regime: Regime::from_r0(r0),
    })
}
