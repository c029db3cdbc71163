//! Revised primal simplex on the multi-marginal transportation polytope.

mod simplex;

pub(crate) use simplex::{Columns, Simplex, SolveStats as LpStats};

use crate::model::CostModel;
use crate::scalar::Scalar;

/// Row layout of the marginal constraints.
///
/// Every atom of marginal 1 has a row; marginals `i >= 2` drop their last atom's row, which is
/// implied by the others. The remaining rows are linearly independent.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    rows: usize,
}

impl Layout {
    pub fn new(dims: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(dims.len());
        let mut rows = 0;
        for (i, &n) in dims.iter().enumerate() {
            offsets.push(rows);
            rows += if i == 0 { n } else { n - 1 };
        }
        Layout {
            dims: dims.to_vec(),
            offsets,
            rows,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn m(&self) -> usize {
        self.dims.len()
    }

    /// Row of atom `a` of marginal `i` (0-based), or `None` for a dropped row.
    pub fn row(&self, i: usize, a: usize) -> Option<usize> {
        if i > 0 && a + 1 == self.dims[i] {
            None
        } else {
            Some(self.offsets[i] + a)
        }
    }

    /// Right-hand side: the weight of each kept row's atom.
    pub fn rhs<S: Scalar>(&self, cm: &CostModel<S>) -> Vec<S> {
        let weights: Vec<Vec<S>> = cm.marginals().iter().map(|mu| mu.weights().to_vec()).collect();
        self.rhs_of(&weights)
    }

    pub fn rhs_of<S: Scalar>(&self, weights: &[Vec<S>]) -> Vec<S> {
        let mut b = vec![S::zero(); self.rows];
        for (i, ws) in weights.iter().enumerate() {
            for (a, w) in ws.iter().enumerate() {
                if let Some(r) = self.row(i, a) {
                    b[r] = w.clone();
                }
            }
        }
        b
    }

    /// Per-marginal potentials `u_i(a)` read from a row vector; dropped rows give zero.
    pub fn potentials<S: Scalar>(&self, y: &[S]) -> Vec<Vec<S>> {
        self.dims
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                (0..n)
                    .map(|a| self.row(i, a).map_or_else(S::zero, |r| y[r].clone()))
                    .collect()
            })
            .collect()
    }
}
