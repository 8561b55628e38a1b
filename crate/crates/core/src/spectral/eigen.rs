//! Perron root of nonnegative matrices by shifted power iteration.
//!
//! The matrix is split into strongly connected components first. The
//! spectral radius of a reducible matrix is the largest spectral radius of
//! its irreducible diagonal blocks, and each irreducible block is handled by
//! power iteration on `B + I`, which is primitive. Iteration stops on the
//! Collatz–Wielandt bracket
//!
//! ```text
//! min_i (B v)_i / v_i  <=  rho(B)  <=  max_i (B v)_i / v_i      (v >> 0)
//! ```
//!
//! so the returned value carries a certified relative error.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

pub const EIGEN_TOLERANCE: f64 = 1e-12;
pub const EIGEN_MAX_ITERATIONS: usize = 100_000;

/// Power-iteration settings.
#[derive(Clone, Copy, Debug)]
pub struct PowerIteration {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration {
            tolerance: EIGEN_TOLERANCE,
            max_iterations: EIGEN_MAX_ITERATIONS,
        }
    }
}

/// Spectral radius of a nonnegative square matrix, to relative accuracy
/// [`EIGEN_TOLERANCE`].
pub fn dominant_eigenvalue(m: &DenseMatrix) -> Result<f64> {
    PowerIteration::default().spectral_radius(m)
}

/// Perron root and its positive eigenvector (sup-normalised) of an
/// irreducible nonnegative matrix.
pub fn perron_vector(m: &DenseMatrix) -> Result<(f64, Vec<f64>)> {
    PowerIteration::default().perron_pair(m)
}

impl PowerIteration {
    pub fn spectral_radius(&self, m: &DenseMatrix) -> Result<f64> {
        check_nonnegative(m)?;
        let a = m.as_nalgebra();
        let mut rho: f64 = 0.0;
        for component in strongly_connected_components(a) {
            let value = match component.as_slice() {
                [i] => a[(*i, *i)],
                _ => self.iterate(&principal(a, &component))?.0,
            };
            rho = rho.max(value);
        }
        Ok(rho)
    }

    pub fn perron_pair(&self, m: &DenseMatrix) -> Result<(f64, Vec<f64>)> {
        check_nonnegative(m)?;
        let a = m.as_nalgebra();
        if a.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if strongly_connected_components(a).len() != 1 {
            return Err(Error::Reducible);
        }
        if a.nrows() == 1 {
            return Ok((a[(0, 0)], vec![1.0]));
        }
        let (rho, v) = self.iterate(a)?;
        Ok((rho, v.iter().copied().collect()))
    }

    /// Power iteration on an irreducible block of size >= 2.
    fn iterate(&self, b: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
        let k = b.nrows();
        let mut v = DVector::from_element(k, 1.0);
        let mut gap = f64::INFINITY;
        for _ in 0..self.max_iterations {
            let w = b * &v;
            let (lo, hi) = w
                .iter()
                .zip(v.iter())
                .map(|(wi, vi)| wi / vi)
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
            if !(lo.is_finite() && hi.is_finite()) {
                break;
            }
            gap = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
            if gap <= self.tolerance {
                let mut u = w + &v;
                let norm = u.amax();
                u /= norm;
                return Ok((0.5 * (lo + hi), u));
            }
            v += w;
            let norm = v.amax();
            v /= norm;
        }
        Err(Error::NonConvergence {
            iterations: self.max_iterations,
            residual: gap,
        })
    }
}

fn check_nonnegative(m: &DenseMatrix) -> Result<()> {
    match m.first_invalid_entry() {
        Some((row, col, value)) => Err(Error::NegativeEntry { row, col, value }),
        None => Ok(()),
    }
}

fn principal(a: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])])
}

/// Strongly connected components of the digraph `i -> j` iff `a[(i, j)] > 0`,
/// each sorted ascending, ordered by smallest member.
pub(crate) fn strongly_connected_components(a: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = a.nrows();
    // Transitive closure (Warshall); the matrices here are small.
    let mut reach = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            reach[i][j] = i == j || a[(i, j)] > 0.0;
        }
    }
    for k in 0..n {
        let through = reach[k].clone();
        for row in reach.iter_mut().filter(|row| row[k]) {
            for (dst, &src) in row.iter_mut().zip(&through) {
                *dst |= src;
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut components = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let comp: Vec<usize> = (i..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &comp {
            assigned[j] = true;
        }
        components.push(comp);
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn two_cycle() {
        let rho = dominant_eigenvalue(&m(&[&[0.0, 2.0], &[0.5, 0.0]])).unwrap();
        assert!((rho - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn leslie_two_by_two_matches_characteristic_root() {
        // lambda^2 - 0.5 lambda - 1 = 0
        let root = (0.5 + (0.25f64 + 4.0).sqrt()) / 2.0;
        let rho = dominant_eigenvalue(&m(&[&[0.0, 2.0], &[0.5, 0.5]])).unwrap();
        assert!((rho - root).abs() <= 1e-12 * root);
        assert!((rho - 1.280776).abs() < 1e-6);
    }

    #[test]
    fn identity_is_reducible_with_unit_radius() {
        assert_eq!(dominant_eigenvalue(&DenseMatrix::identity(3)).unwrap(), 1.0);
        assert!(matches!(
            perron_vector(&DenseMatrix::identity(3)),
            Err(Error::Reducible)
        ));
    }

    #[test]
    fn nilpotent_has_zero_radius() {
        assert_eq!(dominant_eigenvalue(&m(&[&[0.0, 1.0], &[0.0, 0.0]])).unwrap(), 0.0);
        assert_eq!(dominant_eigenvalue(&DenseMatrix::zeros(4)).unwrap(), 0.0);
    }

    #[test]
    fn negative_entries_are_rejected() {
        assert!(matches!(
            dominant_eigenvalue(&m(&[&[0.0, -1.0], &[1.0, 0.0]])),
            Err(Error::NegativeEntry { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn block_triangular_takes_largest_block() {
        let a = m(&[
            &[0.0, 2.0, 5.0, 0.0],
            &[0.5, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 3.0],
            &[0.0, 0.0, 3.0, 0.0],
        ]);
        assert!((dominant_eigenvalue(&a).unwrap() - 3.0).abs() < 1e-12 * 3.0);
    }

    #[test]
    fn perron_vector_is_positive_eigenvector() {
        let a = m(&[&[0.0, 3.0, 10.0], &[0.5, 0.0, 0.0], &[0.0, 0.4, 0.2]]);
        let (rho, v) = perron_vector(&a).unwrap();
        assert!(v.iter().all(|&x| x > 0.0));
        let av = a.mul_vec(&v).unwrap();
        for i in 0..3 {
            assert!((av[i] - rho * v[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let a = m(&[&[0.0, 2.0, 0.0], &[0.5, 0.0, 1.0], &[0.3, 0.1, 0.2]]);
        let pi = PowerIteration {
            tolerance: 1e-14,
            max_iterations: 2,
        };
        assert!(matches!(
            pi.spectral_radius(&a),
            Err(Error::NonConvergence { iterations: 2, .. })
        ));
    }

    #[test]
    fn components() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(strongly_connected_components(&a), vec![vec![0, 1], vec![2]]);
    }
}
