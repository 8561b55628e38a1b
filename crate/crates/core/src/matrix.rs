//! Small dense square matrices used for projection and next-generation
//! operators.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Square real matrix with row-major indexing `(row, col)`, zero-based.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix(DMatrix<f64>);

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        DenseMatrix(DMatrix::identity(dim, dim))
    }

    /// Builds a matrix from rows; every row must have the same length as
    /// the number of rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(DenseMatrix(DMatrix::from_fn(dim, dim, |i, j| rows[i][j])))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect()
    }

    pub fn as_nalgebra(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let y = &self.0 * DVector::from_column_slice(x);
        Ok(y.iter().copied().collect())
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        DenseMatrix(&self.0 * &other.0)
    }

    /// First negative or non-finite entry, if any.
    pub fn first_invalid_entry(&self) -> Option<(usize, usize, f64)> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let v = self.0[(i, j)];
                if !(v.is_finite() && v >= 0.0) {
                    return Some((i, j, v));
                }
            }
        }
        None
    }

    pub fn is_nonnegative(&self) -> bool {
        self.first_invalid_entry().is_none()
    }

    /// `(I - self)^{-1}` by LU factorisation with partial pivoting.
    pub fn inverse_of_identity_minus(&self) -> Result<DenseMatrix> {
        let n = self.dim();
        let lhs = DMatrix::<f64>::identity(n, n) - &self.0;
        lhs.lu()
            .try_inverse()
            .filter(|inv| inv.iter().all(|v| v.is_finite()))
            .map(DenseMatrix)
            .ok_or(Error::SingularMatrix)
    }

    /// Principal submatrix on the given (sorted, distinct) indices.
    pub fn principal_submatrix(&self, indices: &[usize]) -> DenseMatrix {
        let k = indices.len();
        DenseMatrix(DMatrix::from_fn(k, k, |i, j| self.0[(indices[i], indices[j])]))
    }

    /// Entrywise `self <= other` with an absolute slack.
    pub fn entrywise_le(&self, other: &DenseMatrix, slack: f64) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(other.0.iter()).all(|(a, b)| *a <= *b + slack)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut f64 {
        &mut self.0[idx]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Serialize for DenseMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_rows_rejects_ragged_input() {
        let err = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn identity_minus_inverse() {
        let t = DenseMatrix::from_rows(&[vec![0.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let inv = t.inverse_of_identity_minus().unwrap();
        // I - T = [[1, 0], [-0.5, 0.5]]  =>  inverse [[1, 0], [1, 2]]
        let want = [[1.0, 0.0], [1.0, 2.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((inv[(i, j)] - want[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn singular_identity_minus() {
        let t = DenseMatrix::identity(3);
        assert!(matches!(
            t.inverse_of_identity_minus(),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn row_major_indexing() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(m[(0, 1)], 2.0);
        assert_eq!(m[(1, 0)], 3.0);
        assert_eq!(m.mul_vec(&[1.0, 1.0]).unwrap(), vec![3.0, 7.0]);
        assert_eq!(m.rows(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
    }
}
