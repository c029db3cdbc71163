use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coupling::CouplingTensor;
use crate::error::{MmotError, Result};
use crate::graph::InteractionGraph;
use crate::marginal::DiscreteMarginal;
use crate::model::CostModel;
use crate::scalar::Scalar;

/// Which non-uniqueness mechanism to instantiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterKind {
    /// Some component of the graph does not contain vertex 1.
    Disconnected,
    /// Some edge `{1, i}` is absent; every other marginal is a Dirac mass.
    MissingEdge,
}

impl FromStr for CounterKind {
    type Err = MmotError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disconnected" => Ok(CounterKind::Disconnected),
            "missing_edge" | "missing-edge" => Ok(CounterKind::MissingEdge),
            other => Err(MmotError::input(format!("unknown counterexample kind `{other}`"))),
        }
    }
}

/// A cost model with two distinct optimal plans.
#[derive(Debug, Clone)]
pub struct Counterexample<S> {
    pub model: CostModel<S>,
    /// Concentrated on the graph of a map over the first marginal.
    pub monge_plan: CouplingTensor<S>,
    /// Independent coupling of the free blocks; never Monge.
    pub product_plan: CouplingTensor<S>,
    /// The vertex whose coupling with the rest is arbitrary (1-based).
    pub free_vertex: usize,
}

const CORNERS: [(i64, i64); 3] = [(1, 0), (0, 1), (1, 1)];

fn corner<S: Scalar>(rng: &mut ChaCha8Rng) -> Vec<S> {
    let (a, b) = *CORNERS.choose(rng).expect("non-empty");
    vec![S::from_ratio(a, 1), S::from_ratio(b, 1)]
}

fn two_atom<S: Scalar>(c: Vec<S>, q: &S) -> Result<DiscreteMarginal<S>> {
    DiscreteMarginal::new(2, vec![vec![S::zero(); 2], c], vec![q.clone(), S::one() - q.clone()])
}

/// Plan putting mass `q` on the all-zero tuple and `1 - q` on `hi`.
fn diagonal<S: Scalar>(dims: &[usize], hi: &[usize], q: &S) -> Result<CouplingTensor<S>> {
    CouplingTensor::new(
        dims.to_vec(),
        [(vec![0; dims.len()], q.clone()), (hi.to_vec(), S::one() - q.clone())],
    )
}

/// Independent coupling of two aligned blocks: `block` moves together, the rest moves together.
fn block_product<S: Scalar>(dims: &[usize], block: &[bool], q: &S) -> Result<CouplingTensor<S>> {
    let p = [q.clone(), S::one() - q.clone()];
    let mut entries = Vec::with_capacity(4);
    for a in 0..2 {
        for b in 0..2 {
            let t: Vec<usize> = dims
                .iter()
                .zip(block)
                .map(|(&n, &inside)| if n == 1 { 0 } else if inside { a } else { b })
                .collect();
            entries.push((t, p[a].clone() * p[b].clone()));
        }
    }
    CouplingTensor::new(dims.to_vec(), entries)
}

/// Builds marginals on `{0, c}` with `c` a random corner of `[0,1]^2` and common weights
/// `(q, 1-q)`, `q ∈ {1/10, .., 9/10}`. Every pairwise projection of either plan is an
/// optimal coupling of its edge term, so both plans attain the same value.
pub fn gen_counterexample_prop21<S: Scalar>(
    kind: CounterKind,
    g: &InteractionGraph,
    seed: u64,
) -> Result<Counterexample<S>> {
    let m = g.m();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = S::from_ratio(rng.gen_range(1..=9), 10);
    match kind {
        CounterKind::Disconnected => {
            let comp = g.component_of(1);
            let free = (1..=m)
                .find(|v| !comp.contains(v))
                .ok_or_else(|| MmotError::input("graph is connected; no component avoids vertex 1"))?;
            let marginals = (0..m)
                .map(|_| two_atom(corner(&mut rng), &q))
                .collect::<Result<Vec<_>>>()?;
            let model = CostModel::new(g.clone(), marginals)?;
            let dims = vec![2; m];
            let block: Vec<bool> = (1..=m).map(|v| comp.contains(&v)).collect();
            Ok(Counterexample {
                monge_plan: diagonal(&dims, &vec![1; m], &q)?,
                product_plan: block_product(&dims, &block, &q)?,
                model,
                free_vertex: free,
            })
        }
        CounterKind::MissingEdge => {
            let i = (2..=m)
                .find(|&i| !g.has_edge(1, i))
                .ok_or_else(|| MmotError::input("vertex 1 is adjacent to every other vertex"))?;
            let marginals = (1..=m)
                .map(|v| {
                    if v == 1 || v == i {
                        two_atom(corner(&mut rng), &q)
                    } else {
                        Ok(DiscreteMarginal::dirac(corner(&mut rng)))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let model = CostModel::new(g.clone(), marginals)?;
            let dims: Vec<usize> = (1..=m).map(|v| if v == 1 || v == i { 2 } else { 1 }).collect();
            let hi: Vec<usize> = dims.iter().map(|&n| n - 1).collect();
            let block: Vec<bool> = (1..=m).map(|v| v != i).collect();
            Ok(Counterexample {
                monge_plan: diagonal(&dims, &hi, &q)?,
                product_plan: block_product(&dims, &block, &q)?,
                model,
                free_vertex: i,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::example_4_1;
    use crate::graph::{complete, fan};
    use crate::scalar::Rational;
    use crate::verify::monge::{check_monge, MONGE_TOL};

    fn check(kind: CounterKind, g: &InteractionGraph, seed: u64) {
        let ce = gen_counterexample_prop21::<Rational>(kind, g, seed).unwrap();
        assert!(ce.monge_plan.is_feasible(&ce.model, 0.0));
        assert!(ce.product_plan.is_feasible(&ce.model, 0.0));
        assert_eq!(ce.monge_plan.objective(&ce.model), ce.product_plan.objective(&ce.model));
        assert_ne!(ce.monge_plan, ce.product_plan);
        assert!(check_monge(&ce.monge_plan, MONGE_TOL).is_monge);
        assert!(!check_monge(&ce.product_plan, MONGE_TOL).is_monge);
    }

    #[test]
    fn disjoint_edges() {
        let g = InteractionGraph::new(4, [(1, 2), (3, 4)]).unwrap();
        for seed in 0..5 {
            check(CounterKind::Disconnected, &g, seed);
        }
    }

    #[test]
    fn missing_edges() {
        for seed in 0..5 {
            check(CounterKind::MissingEdge, &fan(1, 3).relabel(&[2, 1, 3, 4]).unwrap(), seed);
            check(CounterKind::MissingEdge, &example_4_1(), seed);
        }
    }

    #[test]
    fn hypotheses_are_enforced() {
        assert!(gen_counterexample_prop21::<Rational>(CounterKind::Disconnected, &complete(3), 0).is_err());
        assert!(gen_counterexample_prop21::<Rational>(CounterKind::MissingEdge, &complete(3), 0).is_err());
    }
}
