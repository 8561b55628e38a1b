//! Test-only oracles built directly from the model definitions, sharing no
//! code with the library's matrix layout or eigen solver.
#![allow(dead_code)]

use nalgebra::DMatrix;
use partial_migration::{IsolatedSpec, ModelSpec};

/// Low-density Leslie matrix of one population.
pub fn leslie(p: &IsolatedSpec) -> DMatrix<f64> {
    let n = p.stages();
    let t = p.transitions_at_zero();
    let mut a = DMatrix::zeros(n, n);
    for j in 1..n {
        a[(0, j)] = p.fecundities[j - 1];
    }
    for i in 1..n {
        a[(i, i - 1)] = t[i - 1];
    }
    a[(n - 1, n - 1)] += t[n - 1];
    a
}

/// Low-density projection matrix and the indices of its birth rows.
pub fn projection(spec: &ModelSpec) -> (DMatrix<f64>, Vec<usize>) {
    match spec {
        ModelSpec::Isolated(p) => (leslie(p), vec![0]),
        ModelSpec::SingleEgg(s) => {
            let (n, m) = (s.migrant.stages(), s.resident.stages());
            let (ls, lr) = (leslie(&s.migrant), leslie(&s.resident));
            let d = n + m - 1;
            let mut a = DMatrix::zeros(d, d);
            // Resident stage k (0-based, k >= 1) lives at n + k - 1.
            let r = |k: usize| if k == 0 { 0 } else { n + k - 1 };
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] += ls[(i, j)];
                }
            }
            for i in 0..m {
                for j in 0..m {
                    a[(r(i), r(j))] += lr[(i, j)];
                }
            }
            a[(1, 0)] *= s.phi;
            a[(n, 0)] *= 1.0 - s.phi;
            (a, vec![0])
        }
        ModelSpec::TwoEgg(s) => {
            let (n, m) = (s.migrant.stages(), s.resident.stages());
            let (ls, lr) = (leslie(&s.migrant), leslie(&s.resident));
            let mut a = DMatrix::zeros(n + m, n + m);
            a.view_mut((0, 0), (n, n)).copy_from(&ls);
            a.view_mut((n, n), (m, m)).copy_from(&lr);
            for j in 0..n {
                a[(0, j)] = s.phi_s * ls[(0, j)];
                a[(n, j)] = (1.0 - s.phi_s) * ls[(0, j)];
            }
            for j in 0..m {
                a[(0, n + j)] = (1.0 - s.phi_r) * lr[(0, j)];
                a[(n, n + j)] = s.phi_r * lr[(0, j)];
            }
            (a, vec![0, n])
        }
    }
}

/// Spectral radius of a nonnegative matrix by bisection: `lambda > rho(a)`
/// exactly when `lambda I - a` has an entrywise nonnegative inverse.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    let d = a.nrows();
    let above = |lambda: f64| match (DMatrix::identity(d, d) * lambda - a).try_inverse() {
        Some(inv) => {
            let scale = inv.amax();
            inv.iter().all(|&v| v >= -1e-12 * scale)
        }
        None => false,
    };
    let mut hi = a.row_iter().map(|r| r.sum()).fold(0.0, f64::max).max(1e-300) * (1.0 + 1e-12) + 1e-300;
    let mut lo = 0.0;
    if !above(hi) {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Spectral radius of `F (I - T)^{-1}` with `F` the birth rows of the
/// projection matrix and `T` the rest.
pub fn r0_oracle(spec: &ModelSpec) -> f64 {
    let (a, births) = projection(spec);
    let d = a.nrows();
    let mut f = DMatrix::zeros(d, d);
    let mut t = a.clone();
    for &i in &births {
        f.set_row(i, &a.row(i));
        t.row_mut(i).fill(0.0);
    }
    let inv = (DMatrix::identity(d, d) - t)
        .try_inverse()
        .expect("I - T invertible");
    spectral_radius(&(f * inv))
}

pub fn lambda_oracle(spec: &ModelSpec) -> f64 {
    spectral_radius(&projection(spec).0)
}

/// Two-pool reproduction number from the member values.
pub fn two_pool(rs: f64, rr: f64, ps: f64, pr: f64) -> f64 {
    let s = ps * rs + pr * rr;
    let disc = (ps * rs - pr * rr).powi(2) + 4.0 * rs * rr * (1.0 - ps) * (1.0 - pr);
    0.5 * (s + disc.sqrt())
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn sup(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}
