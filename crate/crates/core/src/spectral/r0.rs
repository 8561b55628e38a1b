//! Basic reproduction numbers.
//!
//! `R0 = rho(F (I - T)^{-1})` where `F` and `T` split the low-density
//! projection matrix into births and transitions. Besides the generic
//! next-generation route there are closed forms for each topology:
//!
//! * isolated: expected lifetime egg output of one egg,
//!   `t1 f2 + t1 t2 f3 + ... + t1...t(n-1) / (1 - tn) fn`;
//! * single egg pool: `phi R0s + (1 - phi) R0r`;
//! * two egg pools: spectral radius of
//!   `[[phi_s R0s, (1 - phi_r) R0r], [(1 - phi_s) R0s, phi_r R0r]]`.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::model::{IsolatedSpec, ModelSpec, NextGenerationSplit, SingleEggSpec, TwoEggSpec};

use super::eigen::dominant_eigenvalue;

/// The next-generation matrix `K = F (I - T)^{-1}`.
pub fn next_generation_matrix(split: &NextGenerationSplit) -> Result<DenseMatrix> {
    let inv = split.transition.inverse_of_identity_minus()?;
    // (I - T)^{-1} = sum T^k is entrywise nonnegative exactly when rho(T) < 1.
    let floor = -1e-12 * inv.as_nalgebra().amax().max(1.0);
    if inv.as_nalgebra().iter().any(|&v| v < floor) {
        return Err(Error::SingularMatrix);
    }
    Ok(split.fecundity.matmul(&inv))
}

/// Reference route: dense power iteration on the full next-generation
/// matrix.
pub fn r0_dense(split: &NextGenerationSplit) -> Result<f64> {
    let k = next_generation_matrix(split)?;
    dominant_eigenvalue(&clamp_rounding(k))
}

/// `R0` from the rows of `K` that can be nonzero: only rows of `F` carrying
/// a birth contribute, so the spectrum of `K` is the spectrum of its
/// principal submatrix on those rows, padded with zeros.
pub fn r0_next_generation(split: &NextGenerationSplit) -> Result<f64> {
    let k = clamp_rounding(next_generation_matrix(split)?);
    let n = split.dim();
    let f = &split.fecundity;
    let birth_rows: Vec<usize> = (0..n).filter(|&i| (0..n).any(|j| f[(i, j)] != 0.0)).collect();
    let sub = k.principal_submatrix(&birth_rows);
    Ok(match birth_rows.len() {
        0 => 0.0,
        1 => sub[(0, 0)],
        2 => spectral_radius_2x2(sub[(0, 0)], sub[(0, 1)], sub[(1, 0)], sub[(1, 1)]),
        _ => dominant_eigenvalue(&sub)?,
    })
}

/// Rounding in `(I - T)^{-1}` can leave `-0.0`-sized negatives where the
/// exact value is zero.
fn clamp_rounding(mut k: DenseMatrix) -> DenseMatrix {
    let n = k.dim();
    for i in 0..n {
        for j in 0..n {
            if k[(i, j)] < 0.0 {
                k[(i, j)] = 0.0;
            }
        }
    }
    k
}

/// Largest eigenvalue of a nonnegative 2x2 matrix.
pub(crate) fn spectral_radius_2x2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let half_trace = 0.5 * (a + d);
    let half_diff = 0.5 * (a - d);
    half_trace + (half_diff * half_diff + b * c).sqrt()
}

/// Closed-form lifetime egg output of an isolated population at low
/// density.
pub fn r0_isolated_closed_form(spec: &IsolatedSpec) -> Result<f64> {
    ModelSpec::Isolated(spec.clone()).ensure_valid()?;
    let t = spec.transitions_at_zero();
    let n = t.len();
    let mut survivorship = 1.0;
    let mut r0 = 0.0;
    for stage in 2..=n {
        survivorship *= t[stage - 2];
        let f = spec.fecundities[stage - 2];
        r0 += if stage == n {
            survivorship / (1.0 - t[n - 1]) * f
        } else {
            survivorship * f
        };
    }
    Ok(r0)
}

/// `phi R0s + (1 - phi) R0r`.
pub fn r0_single_egg(spec: &SingleEggSpec) -> Result<f64> {
    ModelSpec::SingleEgg(spec.clone()).ensure_valid()?;
    let rs = r0_isolated_closed_form(&spec.migrant)?;
    let rr = r0_isolated_closed_form(&spec.resident)?;
    Ok(spec.phi * rs + (1.0 - spec.phi) * rr)
}

pub fn r0_two_egg(spec: &TwoEggSpec) -> Result<f64> {
    ModelSpec::TwoEgg(spec.clone()).ensure_valid()?;
    let rs = r0_isolated_closed_form(&spec.migrant)?;
    let rr = r0_isolated_closed_form(&spec.resident)?;
    two_pool_r0(rs, rr, spec.phi_s, spec.phi_r)
}

/// Two-pool reproduction number from the member reproduction numbers:
///
/// ```text
/// (phi_s Rs + phi_r Rr + sqrt((phi_s Rs + phi_r Rr)^2 - 4 Rs Rr (phi_s + phi_r - 1))) / 2
/// ```
pub fn two_pool_r0(rs: f64, rr: f64, phi_s: f64, phi_r: f64) -> Result<f64> {
    let (sum, disc) = two_pool_terms(rs, rr, phi_s, phi_r);
    if disc < 0.0 {
        let scale = sum * sum + (4.0 * rs * rr).abs();
        if disc < -1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NegativeDiscriminant(disc));
        }
        return Ok(0.5 * sum);
    }
    Ok(0.5 * (sum + disc.sqrt()))
}

pub(crate) fn two_pool_terms(rs: f64, rr: f64, phi_s: f64, phi_r: f64) -> (f64, f64) {
    let sum = phi_s * rs + phi_r * rr;
    // Expanded form: a sum of nonnegative terms, free of cancellation near
    // phi_s = phi_r = 1 with equal members.
    let disc = (phi_s * rs - phi_r * rr).powi(2) + 4.0 * rs * rr * (1.0 - phi_s) * (1.0 - phi_r);
    (sum, disc)
}

/// Member reproduction numbers `(R0s, R0r)` of a coupled spec.
pub fn member_r0s(spec: &ModelSpec) -> Result<Option<(f64, f64)>> {
    match spec {
        ModelSpec::Isolated(_) => Ok(None),
        ModelSpec::SingleEgg(SingleEggSpec {
            migrant, resident, ..
        })
        | ModelSpec::TwoEgg(TwoEggSpec {
            migrant, resident, ..
        }) => Ok(Some((
            r0_isolated_closed_form(migrant)?,
            r0_isolated_closed_form(resident)?,
        ))),
    }
}

/// Reproduction number of any spec by its closed form.
pub fn r0(spec: &ModelSpec) -> Result<f64> {
    match spec {
        ModelSpec::Isolated(s) => r0_isolated_closed_form(s),
        ModelSpec::SingleEgg(s) => r0_single_egg(s),
        ModelSpec::TwoEgg(s) => r0_two_egg(s),
    }
}

impl ModelSpec {
    /// Reproduction number through the next-generation matrix.
    pub fn r0_next_generation(&self) -> Result<f64> {
        r0_next_generation(&self.next_generation_split()?)
    }
}
