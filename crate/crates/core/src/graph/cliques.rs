//! Maximal cliques and inner hubs.

use serde::{Deserialize, Serialize};

use super::{InteractionGraph, VertexSet};
use crate::error::{MmotError, Result};

/// Largest vertex count accepted by [`maximal_cliques`].
pub const CLIQUE_CAP: usize = 32;

/// Maximal cliques of a graph, each sorted, listed lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueSet {
    pub cliques: Vec<VertexSet>,
}

/// Inner hub of a graph: the common pairwise intersection of its maximal cliques, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HubResult {
    pub hub: Option<VertexSet>,
    pub cliques: CliqueSet,
}

fn to_mask(set: &VertexSet) -> u64 {
    set.iter().fold(0u64, |acc, &v| acc | (1u64 << (v - 1)))
}

fn from_mask(mask: u64) -> VertexSet {
    (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}

fn bron_kerbosch(adj: &[u64], r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let pivot_pool = p | x;
    let pivot = (0..adj.len())
        .filter(|&u| pivot_pool >> u & 1 == 1)
        .max_by_key(|&u| ((p & adj[u]).count_ones(), std::cmp::Reverse(u)))
        .expect("pool is nonempty");
    let mut candidates = p & !adj[pivot];
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        candidates &= candidates - 1;
        let bit = 1u64 << v;
        bron_kerbosch(adj, r | bit, p & adj[v], x & adj[v], out);
        p &= !bit;
        x |= bit;
    }
}

/// Enumerates all maximal cliques (pivoting Bron–Kerbosch); `m` is capped at [`CLIQUE_CAP`].
pub fn maximal_cliques(g: &InteractionGraph) -> Result<CliqueSet> {
    if g.m() > CLIQUE_CAP {
        return Err(MmotError::Resource {
            what: "vertex count for clique enumeration",
            actual: g.m() as u128,
            cap: CLIQUE_CAP as u128,
        });
    }
    let adj: Vec<u64> = (1..=g.m()).map(|v| to_mask(g.nbrs(v))).collect();
    let all = if g.m() == 64 { u64::MAX } else { (1u64 << g.m()) - 1 };
    let mut raw = Vec::new();
    bron_kerbosch(&adj, 0, all, 0, &mut raw);
    let mut cliques: Vec<VertexSet> = raw.into_iter().map(from_mask).collect();
    cliques.sort();
    Ok(CliqueSet { cliques })
}

/// Common pairwise intersection of a clique family; a single clique is its own hub.
pub fn hub_of_cliques(cliques: &[VertexSet]) -> Option<VertexSet> {
    match cliques {
        [] => None,
        [only] => Some(only.clone()),
        [a, b, ..] => {
            let hub: VertexSet = a.intersection(b).copied().collect();
            for (i, ci) in cliques.iter().enumerate() {
                for cj in &cliques[i + 1..] {
                    if ci.intersection(cj).copied().collect::<VertexSet>() != hub {
                        return None;
                    }
                }
            }
            Some(hub)
        }
    }
}

pub fn inner_hub(g: &InteractionGraph) -> Result<HubResult> {
    let cliques = maximal_cliques(g)?;
    let hub = hub_of_cliques(&cliques.cliques);
    Ok(HubResult { hub, cliques })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, edgeless, fan};

    fn sets(v: &[&[usize]]) -> Vec<VertexSet> {
        v.iter().map(|s| s.iter().copied().collect()).collect()
    }

    pub(crate) fn example_2_1() -> InteractionGraph {
        let cliques = sets(&[&[6, 7, 8, 9], &[4, 5, 6, 7, 8], &[1, 2, 3, 6, 7, 8, 10]]);
        let mut edges = std::collections::BTreeSet::new();
        for c in &cliques {
            for &i in c {
                for &j in c {
                    if i < j {
                        edges.insert((i, j));
                    }
                }
            }
        }
        InteractionGraph::new(10, edges).unwrap()
    }

    #[test]
    fn example_2_1_cliques_and_hub() {
        let g = example_2_1();
        let hub = inner_hub(&g).unwrap();
        assert_eq!(
            hub.cliques.cliques,
            sets(&[&[1, 2, 3, 6, 7, 8, 10], &[4, 5, 6, 7, 8], &[6, 7, 8, 9]])
        );
        assert_eq!(hub.hub, Some(VertexSet::from([6, 7, 8])));
    }

    #[test]
    fn complete_and_degenerate_graphs() {
        let k5 = inner_hub(&complete(5)).unwrap();
        assert_eq!(k5.cliques.cliques, sets(&[&[1, 2, 3, 4, 5]]));
        assert_eq!(k5.hub, Some((1..=5).collect()));
        assert_eq!(inner_hub(&edgeless(1)).unwrap().hub, Some(VertexSet::from([1])));
        let e3 = inner_hub(&edgeless(3)).unwrap();
        assert_eq!(e3.cliques.cliques, sets(&[&[1], &[2], &[3]]));
        assert_eq!(e3.hub, Some(VertexSet::new()));
    }

    #[test]
    fn five_cycle_cliques_are_edges() {
        let c = maximal_cliques(&cycle(5)).unwrap();
        assert_eq!(c.cliques, sets(&[&[1, 2], &[1, 5], &[2, 3], &[3, 4], &[4, 5]]));
    }

    #[test]
    fn disjoint_complete_graphs_have_empty_hub() {
        let g = InteractionGraph::new(5, [(1, 2), (3, 4), (3, 5), (4, 5)]).unwrap();
        assert_eq!(inner_hub(&g).unwrap().hub, Some(VertexSet::new()));
    }

    #[test]
    fn fan_without_hub() {
        assert_eq!(inner_hub(&fan(1, 4)).unwrap().hub, None);
        assert_eq!(inner_hub(&fan(1, 3)).unwrap().hub, Some(VertexSet::from([1, 3])));
    }

    #[test]
    fn cap_is_enforced() {
        let err = maximal_cliques(&edgeless(CLIQUE_CAP + 1)).unwrap_err();
        assert!(err.to_string().contains("32"));
        assert!(maximal_cliques(&edgeless(CLIQUE_CAP)).is_ok());
    }
}
