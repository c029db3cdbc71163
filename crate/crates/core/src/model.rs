//! The graph-structured surplus `b(x) = Σ_{{i,j} ∈ E} x_i · x_j` over a product of discrete supports.

use crate::error::{MmotError, Result};
use crate::graph::InteractionGraph;
use crate::marginal::DiscreteMarginal;
use crate::scalar::Scalar;

/// Default cap on the number of LP variables (product of support sizes).
pub const DEFAULT_VAR_CAP: usize = 200_000;

/// Variable cap, overridable through `MMOT_VAR_CAP`.
pub fn var_cap() -> usize {
    std::env::var("MMOT_VAR_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_VAR_CAP)
}

/// Mixed-radix indexing of atom tuples; the first marginal is the most significant digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    dims: Vec<usize>,
    strides: Vec<u128>,
    total: u128,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Self {
        let mut strides = vec![1u128; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1].saturating_mul(dims[i + 1] as u128);
        }
        let total = dims.iter().fold(1u128, |acc, &n| acc.saturating_mul(n as u128));
        Shape { dims, strides, total }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn encode(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(&i, &s)| i as u128 * s).sum::<u128>() as usize
    }

    pub fn decode(&self, mut lin: usize, out: &mut [usize]) {
        for i in (0..self.dims.len()).rev() {
            out[i] = lin % self.dims[i];
            lin /= self.dims[i];
        }
    }

    /// Advances `idx` to the next tuple in linear order.
    pub fn increment(&self, idx: &mut [usize]) {
        for i in (0..self.dims.len()).rev() {
            idx[i] += 1;
            if idx[i] < self.dims[i] {
                return;
            }
            idx[i] = 0;
        }
    }

    /// Errors when the tuple count exceeds `cap`.
    pub fn check_cap(&self, cap: usize) -> Result<usize> {
        if self.total > cap as u128 {
            return Err(MmotError::Resource {
                what: "LP variable count",
                actual: self.total,
                cap: cap as u128,
            });
        }
        Ok(self.total as usize)
    }
}

/// Dot products `x_i(a) · x_j(b)` for one edge, row-major in `(a, b)`.
#[derive(Debug, Clone)]
struct PairTable<S> {
    i: usize,
    j: usize,
    nj: usize,
    values: Vec<S>,
}

/// Interaction graph plus one marginal per vertex.
#[derive(Debug, Clone)]
pub struct CostModel<S> {
    graph: InteractionGraph,
    marginals: Vec<DiscreteMarginal<S>>,
    shape: Shape,
    tables: Vec<PairTable<S>>,
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

impl<S: Scalar> CostModel<S> {
    pub fn new(graph: InteractionGraph, marginals: Vec<DiscreteMarginal<S>>) -> Result<Self> {
        if marginals.len() != graph.m() {
            return Err(MmotError::input(format!(
                "graph has {} vertices but {} marginals were given",
                graph.m(),
                marginals.len()
            )));
        }
        let d = marginals[0].d();
        if let Some(i) = marginals.iter().position(|mu| mu.d() != d) {
            return Err(MmotError::input(format!(
                "marginal {} has dimension {}, expected {d}",
                i + 1,
                marginals[i].d()
            )));
        }
        let shape = Shape::new(marginals.iter().map(DiscreteMarginal::n).collect());
        let tables = graph
            .edges()
            .map(|(i, j)| {
                let (mi, mj) = (&marginals[i - 1], &marginals[j - 1]);
                let mut values = Vec::with_capacity(mi.n() * mj.n());
                for a in mi.atoms() {
                    for b in mj.atoms() {
                        values.push(dot(a, b));
                    }
                }
                PairTable {
                    i: i - 1,
                    j: j - 1,
                    nj: mj.n(),
                    values,
                }
            })
            .collect();
        Ok(CostModel {
            graph,
            marginals,
            shape,
            tables,
        })
    }

    pub fn graph(&self) -> &InteractionGraph {
        &self.graph
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn marginals(&self) -> &[DiscreteMarginal<S>] {
        &self.marginals
    }

    pub fn marginal(&self, i: usize) -> &DiscreteMarginal<S> {
        &self.marginals[i]
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Surplus at a tuple of 0-based atom indices, with range checks.
    pub fn cost(&self, idx: &[usize]) -> Result<S> {
        if idx.len() != self.m() {
            return Err(MmotError::input(format!(
                "tuple has {} entries, expected {}",
                idx.len(),
                self.m()
            )));
        }
        if let Some(i) = (0..idx.len()).find(|&i| idx[i] >= self.shape.dims[i]) {
            return Err(MmotError::input(format!(
                "atom index {} out of range for marginal {} ({} atoms)",
                idx[i],
                i + 1,
                self.shape.dims[i]
            )));
        }
        Ok(self.cost_unchecked(idx))
    }

    /// Surplus at an in-range tuple.
    pub fn cost_unchecked(&self, idx: &[usize]) -> S {
        self.tables.iter().fold(S::zero(), |acc, t| {
            acc + t.values[idx[t.i] * t.nj + idx[t.j]].clone()
        })
    }

    /// `Σ_{s ∈ N(v)} x_s` for 1-based vertex `v`.
    pub fn neighbor_sum(&self, v: usize, idx: &[usize]) -> Vec<S> {
        let d = self.marginals[0].d();
        let mut out = vec![S::zero(); d];
        for &s in self.graph.nbrs(v) {
            for (o, x) in out.iter_mut().zip(self.marginals[s - 1].atom(idx[s - 1])) {
                *o += x.clone();
            }
        }
        out
    }

    /// Same graph and atoms in another arithmetic mode.
    pub fn convert<T: Scalar>(&self) -> CostModel<T> {
        CostModel::new(
            self.graph.clone(),
            self.marginals.iter().map(DiscreteMarginal::convert).collect(),
        )
        .expect("conversion preserves validity")
    }

    /// Replaces marginal `i` (0-based).
    pub fn with_marginal(&self, i: usize, mu: DiscreteMarginal<S>) -> Result<Self> {
        let mut marginals = self.marginals.clone();
        marginals[i] = mu;
        CostModel::new(self.graph.clone(), marginals)
    }
}
