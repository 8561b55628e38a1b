//! Placement of vital rates into projection matrices.
//!
//! Every model is described as a list of constant fecundity entries and a
//! list of transition entries. A transition entry at `(row, col)` carries
//! `weight * t(x[col])`: density always acts through the source coordinate.

use super::rule::TransitionRule;
use super::spec::{IsolatedSpec, ModelSpec, SingleEggSpec, TwoEggSpec};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FecundityEntry {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitionEntry<'a> {
    pub row: usize,
    pub col: usize,
    pub weight: f64,
    pub rule: &'a TransitionRule,
}

#[derive(Clone, Debug)]
pub struct ProjectionLayout<'a> {
    pub dim: usize,
    pub egg_rows: Vec<usize>,
    pub fecundities: Vec<FecundityEntry>,
    pub transitions: Vec<TransitionEntry<'a>>,
}

/// Chain of `stages - 1` forward transitions starting at `offset`, plus the
/// terminal self-loop. The first transition leaves coordinate `entry_col`
/// (the egg pool) with weight `entry_weight`.
fn push_chain<'a>(
    out: &mut Vec<TransitionEntry<'a>>,
    spec: &'a IsolatedSpec,
    entry_col: usize,
    entry_weight: f64,
    offset: usize,
) {
    let n = spec.stages();
    // Stage k (1-based, k >= 2) sits at coordinate offset + k - 2.
    let coord = |k: usize| offset + k - 2;
    for (i, rule) in spec.transitions.iter().enumerate().take(n - 1) {
        let stage = i + 1;
        let (col, weight) = if stage == 1 {
            (entry_col, entry_weight)
        } else {
            (coord(stage), 1.0)
        };
        out.push(TransitionEntry {
            row: coord(stage + 1),
            col,
            weight,
            rule,
        });
    }
    out.push(TransitionEntry {
        row: coord(n),
        col: coord(n),
        weight: 1.0,
        rule: &spec.transitions[n - 1],
    });
}

fn push_fecundities(
    out: &mut Vec<FecundityEntry>,
    spec: &IsolatedSpec,
    row: usize,
    weight: f64,
    offset: usize,
) {
    for (k, &f) in spec.fecundities.iter().enumerate() {
        // f_{k+2} belongs to stage k + 2, at coordinate offset + k.
        out.push(FecundityEntry {
            row,
            col: offset + k,
            value: weight * f,
        });
    }
}

impl ModelSpec {
    /// Structural description of the projection matrix. Assumes the stage
    /// counts are at least 2 (see [`ModelSpec::ensure_valid`]).
    pub fn layout(&self) -> ProjectionLayout<'_> {
        let mut fecundities = Vec::new();
        let mut transitions = Vec::new();
        match self {
            ModelSpec::Isolated(s) => {
                push_fecundities(&mut fecundities, s, 0, 1.0, 1);
                push_chain(&mut transitions, s, 0, 1.0, 1);
            }
            ModelSpec::SingleEgg(SingleEggSpec {
                migrant,
                resident,
                phi,
            }) => {
                let n = migrant.stages();
                push_fecundities(&mut fecundities, migrant, 0, 1.0, 1);
                push_fecundities(&mut fecundities, resident, 0, 1.0, n);
                push_chain(&mut transitions, migrant, 0, *phi, 1);
                push_chain(&mut transitions, resident, 0, 1.0 - phi, n);
            }
            ModelSpec::TwoEgg(TwoEggSpec {
                migrant,
                resident,
                phi_s,
                phi_r,
            }) => {
                let n = migrant.stages();
                push_fecundities(&mut fecundities, migrant, 0, *phi_s, 1);
                push_fecundities(&mut fecundities, resident, 0, 1.0 - phi_r, n + 1);
                push_fecundities(&mut fecundities, migrant, n, 1.0 - phi_s, 1);
                push_fecundities(&mut fecundities, resident, n, *phi_r, n + 1);
                push_chain(&mut transitions, migrant, 0, 1.0, 1);
                push_chain(&mut transitions, resident, n, 1.0, n + 1);
            }
        }
        ProjectionLayout {
            dim: self.dim(),
            egg_rows: self.egg_indices(),
            fecundities,
            transitions,
        }
    }

    /// Projection matrix `A(x)` evaluated at state `x`.
    pub fn assemble(&self, x: &[f64]) -> Result<DenseMatrix> {
        self.ensure_valid()?;
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(self.layout().assemble(x))
    }

    /// Jacobian at the origin, `A(0)`.
    pub fn linearization(&self) -> Result<DenseMatrix> {
        self.assemble(&vec![0.0; self.dim()])
    }

    /// Fecundity part `F` and transition part `T` of the linearization.
    pub fn next_generation_split(&self) -> Result<NextGenerationSplit> {
        self.ensure_valid()?;
        let layout = self.layout();
        let mut fecundity = DenseMatrix::zeros(layout.dim);
        let mut transition = DenseMatrix::zeros(layout.dim);
        for e in &layout.fecundities {
            fecundity[(e.row, e.col)] += e.value;
        }
        for e in &layout.transitions {
            transition[(e.row, e.col)] += e.weight * e.rule.at_zero();
        }
        Ok(NextGenerationSplit {
            fecundity,
            transition,
        })
    }
}

impl ProjectionLayout<'_> {
    pub fn assemble(&self, x: &[f64]) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim);
        for e in &self.fecundities {
            m[(e.row, e.col)] += e.value;
        }
        for e in &self.transitions {
            m[(e.row, e.col)] += e.weight * e.rule.probability(x[e.col]);
        }
        m
    }
}

/// `A_0 = F + T`, with `F` holding the fecundities and `T` the transitions.
#[derive(Clone, Debug)]
pub struct NextGenerationSplit {
    pub fecundity: DenseMatrix,
    pub transition: DenseMatrix,
}

impl NextGenerationSplit {
    /// Split an arbitrary projection matrix: rows listed in `birth_rows`
    /// are fecundity rows, everything else is a transition.
    pub fn from_matrix(a: &DenseMatrix, birth_rows: &[usize]) -> Result<Self> {
        let n = a.dim();
        if let Some(&bad) = birth_rows.iter().find(|&&r| r >= n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad + 1,
            });
        }
        let mut fecundity = DenseMatrix::zeros(n);
        let mut transition = DenseMatrix::zeros(n);
        for i in 0..n {
            let target = if birth_rows.contains(&i) {
                &mut fecundity
            } else {
                &mut transition
            };
            for j in 0..n {
                target[(i, j)] = a[(i, j)];
            }
        }
        Ok(NextGenerationSplit {
            fecundity,
            transition,
        })
    }

    pub fn dim(&self) -> usize {
        self.fecundity.dim()
    }
}
