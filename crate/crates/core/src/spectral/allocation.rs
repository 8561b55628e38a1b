//! The two-pool reproduction number as a function of the allocations
//! `(phi_s, phi_r)` over the unit square.
//!
//! When the member reproduction numbers differ the surface has no interior
//! extremum; its maximum is the larger member value, attained along the
//! whole edge where that member keeps all of its own offspring (`phi_s = 1`
//! for migrants, `phi_r = 1` for residents). Equal members give a flat
//! surface.

use rayon::prelude::*;
use serde::Serialize;

use super::r0::{member_r0s, two_pool_r0, two_pool_terms};
use crate::error::{Error, Result};
use crate::model::{ModelSpec, TwoEggSpec};

pub const DEFAULT_GRID_RESOLUTION: usize = 101;

/// Relative tolerance for membership in the argmax set and for the
/// boundary-maximum check.
pub const ARGMAX_TOLERANCE: f64 = 1e-9;

/// Where the surface maximum is expected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictedMaximum {
    /// `R0s > R0r`: maximum `R0s` along `phi_s = 1`.
    MigrantEdge,
    /// `R0r > R0s`: maximum `R0r` along `phi_r = 1`.
    ResidentEdge,
    /// `R0s = R0r`: constant surface.
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Corners {
    pub origin: f64,
    pub migrant_only: f64,
    pub resident_only: f64,
    pub both: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AllocationSurface {
    /// Grid coordinates shared by both axes, `k / (resolution - 1)`.
    pub grid: Vec<f64>,
    /// `values[i * resolution + j]` is the value at `(grid[i], grid[j])`
    /// = `(phi_s, phi_r)`.
    pub values: Vec<f64>,
    pub r0_migrant: f64,
    pub r0_resident: f64,
    pub max: f64,
    pub min: f64,
    pub argmax: Vec<(f64, f64)>,
    /// `origin` = (0, 0), `migrant_only` = (1, 0), `resident_only` = (0, 1),
    /// `both` = (1, 1).
    pub corners: Corners,
    pub predicted: PredictedMaximum,
    /// The empirical argmax and maximum match the prediction.
    pub boundary_consistent: bool,
}

impl AllocationSurface {
    pub fn resolution(&self) -> usize {
        self.grid.len()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.resolution() + j]
    }
}

pub fn predicted_maximum(rs: f64, rr: f64) -> PredictedMaximum {
    if (rs - rr).abs() <= 1e-12 * rs.abs().max(rr.abs()) {
        PredictedMaximum::Constant
    } else if rs > rr {
        PredictedMaximum::MigrantEdge
    } else {
        PredictedMaximum::ResidentEdge
    }
}

/// Uniform `resolution x resolution` grid over the closed unit square.
pub fn allocation_surface(spec: &TwoEggSpec, resolution: usize) -> Result<AllocationSurface> {
    ModelSpec::TwoEgg(spec.clone()).ensure_valid()?;
    if resolution < 2 {
        return Err(Error::Config(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    let (rs, rr) = member_r0s(&ModelSpec::TwoEgg(spec.clone()))?.expect("coupled spec");
    surface_from_members(rs, rr, resolution)
}

pub(crate) fn surface_from_members(rs: f64, rr: f64, resolution: usize) -> Result<AllocationSurface> {
    let grid: Vec<f64> = (0..resolution)
        .map(|k| k as f64 / (resolution - 1) as f64)
        .collect();
    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&ps| {
            grid.iter()
                .map(|&pr| two_pool_r0(rs, rr, ps, pr))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = rows.into_iter().flatten().collect();

    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let cut = max - ARGMAX_TOLERANCE * max.abs().max(1.0);
    let argmax: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= cut)
        .map(|(k, _)| (grid[k / resolution], grid[k % resolution]))
        .collect();

    let corners = Corners {
        origin: two_pool_r0(rs, rr, 0.0, 0.0)?,
        migrant_only: two_pool_r0(rs, rr, 1.0, 0.0)?,
        resident_only: two_pool_r0(rs, rr, 0.0, 1.0)?,
        both: two_pool_r0(rs, rr, 1.0, 1.0)?,
    };

    let predicted = predicted_maximum(rs, rr);
    let near = |a: f64, b: f64| (a - b).abs() <= ARGMAX_TOLERANCE * b.abs().max(1.0);
    let boundary_consistent = match predicted {
        PredictedMaximum::MigrantEdge => near(max, rs) && argmax.iter().all(|&(ps, _)| ps == 1.0),
        PredictedMaximum::ResidentEdge => near(max, rr) && argmax.iter().all(|&(_, pr)| pr == 1.0),
        PredictedMaximum::Constant => values.iter().all(|&v| (v - rs).abs() <= 1e-10 * rs.max(1.0)),
    };

    Ok(AllocationSurface {
        grid,
        values,
        r0_migrant: rs,
        r0_resident: rr,
        max,
        min,
        argmax,
        corners,
        predicted,
        boundary_consistent,
    })
}

/// Closed-form partial derivatives `(d/dphi_s, d/dphi_r)` of the two-pool
/// reproduction number:
///
/// ```text
/// 2 dR/dphi_s = Rs + ((Rs phi_s + Rr phi_r) Rs - 2 Rs Rr) / sqrt(disc)
/// 2 dR/dphi_r = Rr + ((Rs phi_s + Rr phi_r) Rr - 2 Rs Rr) / sqrt(disc)
/// ```
pub fn two_pool_gradient(rs: f64, rr: f64, phi_s: f64, phi_r: f64) -> Result<(f64, f64)> {
    let undefined = |reason| Error::GradientUndefined { phi_s, phi_r, reason };
    if !(phi_s > 0.0 && phi_s < 1.0 && phi_r > 0.0 && phi_r < 1.0) {
        return Err(undefined("allocations must lie in the open unit square"));
    }
    if rs == 0.0 || rr == 0.0 {
        return Err(undefined("member reproduction numbers must be nonzero"));
    }
    let (sum, disc) = two_pool_terms(rs, rr, phi_s, phi_r);
    if disc <= 0.0 {
        return Err(undefined("square root vanishes"));
    }
    let root = disc.sqrt();
    let d_s = 0.5 * (rs + (sum * rs - 2.0 * rs * rr) / root);
    let d_r = 0.5 * (rr + (sum * rr - 2.0 * rs * rr) / root);
    Ok((d_s, d_r))
}

pub fn r0_two_egg_gradient(spec: &TwoEggSpec, phi_s: f64, phi_r: f64) -> Result<(f64, f64)> {
    let (rs, rr) = member_r0s(&ModelSpec::TwoEgg(spec.clone()))?.expect("coupled spec");
    two_pool_gradient(rs, rr, phi_s, phi_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::IsolatedSpec;

    fn spec(resident: IsolatedSpec) -> TwoEggSpec {
        TwoEggSpec {
            migrant: IsolatedSpec::linear(&[0.5, 0.4, 0.2], &[3.0, 10.0]),
            resident,
            phi_s: 0.5,
            phi_r: 0.5,
        }
    }

    #[test]
    fn migrant_dominant_surface() {
        let s = allocation_surface(&spec(IsolatedSpec::linear(&[0.25, 0.2], &[2.0])), 11).unwrap();
        assert_eq!(s.values.len(), 121);
        assert_eq!(s.predicted, PredictedMaximum::MigrantEdge);
        assert!(s.boundary_consistent);
        assert!((s.max - 4.0).abs() < 1e-12);
        assert_eq!(s.argmax.len(), 11);
        assert!((s.corners.origin - 2.5f64.sqrt()).abs() < 1e-12);
        assert!((s.corners.resident_only - 0.625).abs() < 1e-12);
        assert!((s.corners.migrant_only - 4.0).abs() < 1e-12);
        assert!((s.corners.both - 4.0).abs() < 1e-12);
        assert!(s.min >= 0.625 - 1e-10 && s.max <= 4.0 + 1e-10);
    }

    #[test]
    fn equal_members_give_flat_surface() {
        // Resident identical to the migrant: R0 = 4 for both.
        let s = allocation_surface(&spec(IsolatedSpec::linear(&[0.5, 0.4, 0.2], &[3.0, 10.0])), 21).unwrap();
        assert_eq!(s.predicted, PredictedMaximum::Constant);
        assert!(s.boundary_consistent);
        assert!(s.values.iter().all(|v| (v - 4.0).abs() <= 1e-10));
    }

    #[test]
    fn resolution_must_be_at_least_two() {
        assert!(allocation_surface(&spec(IsolatedSpec::linear(&[0.25, 0.2], &[2.0])), 1).is_err());
    }

    #[test]
    fn gradient_matches_central_differences() {
        let (rs, rr) = (4.0, 0.625);
        let h = 1e-6;
        let f = |a: f64, b: f64| two_pool_r0(rs, rr, a, b).unwrap();
        let (ds, dr) = two_pool_gradient(rs, rr, 0.5, 0.5).unwrap();
        let fd_s = (f(0.5 + h, 0.5) - f(0.5 - h, 0.5)) / (2.0 * h);
        let fd_r = (f(0.5, 0.5 + h) - f(0.5, 0.5 - h)) / (2.0 * h);
        assert!((ds - fd_s).abs() < 1e-6, "{ds} vs {fd_s}");
        assert!((dr - fd_r).abs() < 1e-6, "{dr} vs {fd_r}");
    }

    #[test]
    fn gradient_symmetry_under_relabelling() {
        let (ds, dr) = two_pool_gradient(4.0, 0.625, 0.3, 0.7).unwrap();
        let (ds2, dr2) = two_pool_gradient(0.625, 4.0, 0.7, 0.3).unwrap();
        assert!((ds - dr2).abs() < 1e-14);
        assert!((dr - ds2).abs() < 1e-14);
    }

    #[test]
    fn no_interior_critical_point() {
        for i in 1..50 {
            for j in 1..50 {
                let (ds, dr) = two_pool_gradient(4.0, 0.625, i as f64 / 50.0, j as f64 / 50.0).unwrap();
                assert!(ds.abs() > 1e-9 || dr.abs() > 1e-9);
            }
        }
    }

    #[test]
    fn gradient_boundary_errors() {
        assert!(two_pool_gradient(4.0, 0.625, 1.0, 0.5).is_err());
        assert!(two_pool_gradient(4.0, 0.0, 0.5, 0.5).is_err());
    }
}
