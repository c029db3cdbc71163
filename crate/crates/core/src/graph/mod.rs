//! Interaction graphs on vertices `1..=m` and the constructions used by the classifier.

mod cliques;
mod families;
mod format;
mod gluing;

pub use cliques::{hub_of_cliques, inner_hub, maximal_cliques, CliqueSet, HubResult, CLIQUE_CAP};
pub use families::{cocktail_party, complete, cycle, edgeless, fan, path, star};
pub use format::{parse_graph, parse_graph_json, parse_graph_text};
pub use gluing::{enumerate_gluings, find_gluing, parse_gluing_hint, GluingDecomposition, GluingPart, MetaEdge};

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{MmotError, Result};

/// Sorted set of 1-based vertex indices.
pub type VertexSet = BTreeSet<usize>;

/// Simple undirected graph on `1..=m`; its edges index the bilinear terms of the surplus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct InteractionGraph {
    m: usize,
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<VertexSet>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    m: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<RawGraph> for InteractionGraph {
    type Error = MmotError;

    fn try_from(raw: RawGraph) -> Result<Self> {
        InteractionGraph::new(raw.m, raw.edges.into_iter().map(|[i, j]| (i, j)))
    }
}

impl From<InteractionGraph> for RawGraph {
    fn from(g: InteractionGraph) -> Self {
        RawGraph {
            m: g.m,
            edges: g.edges.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }
}

impl InteractionGraph {
    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range endpoints.
    pub fn new(m: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if m == 0 {
            return Err(MmotError::input("graph must have at least one vertex"));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(MmotError::input(format!("self-loop at vertex {a}")));
            }
            if a == 0 || b == 0 || a > m || b > m {
                return Err(MmotError::input(format!(
                    "edge {{{a},{b}}} has an endpoint outside 1..{m}"
                )));
            }
            let e = (a.min(b), a.max(b));
            if !set.insert(e) {
                return Err(MmotError::input(format!("duplicate edge {{{},{}}}", e.0, e.1)));
            }
        }
        Ok(Self::from_set(m, set))
    }

    fn from_set(m: usize, edges: BTreeSet<(usize, usize)>) -> Self {
        let mut adj = vec![VertexSet::new(); m + 1];
        for &(i, j) in &edges {
            adj[i].insert(j);
            adj[j].insert(i);
        }
        InteractionGraph { m, edges, adj }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        1..=self.m
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj.get(v).map_or(0, |s| s.len())
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.m {
            return Err(MmotError::input(format!("vertex {v} outside 1..{}", self.m)));
        }
        Ok(())
    }

    /// Open neighborhood N(v).
    pub fn neighborhood(&self, v: usize) -> Result<VertexSet> {
        self.check_vertex(v)?;
        Ok(self.adj[v].clone())
    }

    /// Closed neighborhood N(v) ∪ {v}.
    pub fn closed_neighborhood(&self, v: usize) -> Result<VertexSet> {
        let mut n = self.neighborhood(v)?;
        n.insert(v);
        Ok(n)
    }

    /// Borrowing accessor for N(v); panics on an out-of-range vertex.
    pub fn nbrs(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    /// Vertices reachable from `v`, including `v`.
    pub fn component_of(&self, v: usize) -> VertexSet {
        let mut seen = VertexSet::new();
        if v == 0 || v > self.m {
            return seen;
        }
        let mut queue = VecDeque::from([v]);
        seen.insert(v);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Connected components, ordered by smallest member.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut out: Vec<VertexSet> = Vec::new();
        let mut seen = VertexSet::new();
        for v in self.vertices() {
            if !seen.contains(&v) {
                let c = self.component_of(v);
                seen.extend(c.iter().copied());
                out.push(c);
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.component_of(1).len() == self.m
    }

    pub fn complement(&self) -> InteractionGraph {
        let mut edges = BTreeSet::new();
        for i in 1..=self.m {
            for j in i + 1..=self.m {
                if !self.has_edge(i, j) {
                    edges.insert((i, j));
                }
            }
        }
        Self::from_set(self.m, edges)
    }

    /// `(V(g), E(g) \ E(s))`; `s` must be a spanning subgraph of `g`.
    pub fn extract(&self, s: &InteractionGraph) -> Result<InteractionGraph> {
        if s.m != self.m {
            return Err(MmotError::input(format!(
                "extracted graph has {} vertices, host has {}",
                s.m, self.m
            )));
        }
        if let Some(&(i, j)) = s.edges.iter().find(|e| !self.edges.contains(e)) {
            return Err(MmotError::input(format!("edge {{{i},{j}}} is not in the host graph")));
        }
        let edges = self.edges.difference(&s.edges).copied().collect();
        Ok(Self::from_set(self.m, edges))
    }

    /// Graph join: `other` is shifted by `self.m` and every cross pair becomes an edge.
    pub fn join(&self, other: &InteractionGraph) -> InteractionGraph {
        let shift = self.m;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(i, j)| (i + shift, j + shift)));
        for i in 1..=self.m {
            for j in 1..=other.m {
                edges.insert((i, j + shift));
            }
        }
        Self::from_set(self.m + other.m, edges)
    }

    /// Subgraph induced on `vs`, keeping the original labels and vertex count.
    pub fn induced_edges(&self, vs: &VertexSet) -> BTreeSet<(usize, usize)> {
        self.edges
            .iter()
            .filter(|(i, j)| vs.contains(i) && vs.contains(j))
            .copied()
            .collect()
    }

    /// Graph on `1..=k` induced by `vs` (relabelled in increasing order) and the label map.
    pub fn induced(&self, vs: &VertexSet) -> (InteractionGraph, Vec<usize>) {
        let labels: Vec<usize> = vs.iter().copied().collect();
        let pos = |v: usize| labels.binary_search(&v).unwrap() + 1;
        let edges = self
            .induced_edges(vs)
            .into_iter()
            .map(|(i, j)| (pos(i), pos(j)))
            .collect();
        (Self::from_set(labels.len().max(1), edges), labels)
    }

    /// Applies `perm`, where `perm[v-1]` is the new label of vertex `v`.
    pub fn relabel(&self, perm: &[usize]) -> Result<InteractionGraph> {
        let mut check: Vec<usize> = perm.to_vec();
        check.sort_unstable();
        if check != (1..=self.m).collect::<Vec<_>>() {
            return Err(MmotError::input("relabelling is not a permutation of 1..m"));
        }
        InteractionGraph::new(
            self.m,
            self.edges.iter().map(|&(i, j)| (perm[i - 1], perm[j - 1])),
        )
    }

    /// Partition classes when the complement is a disjoint union of complete graphs.
    pub fn is_complete_k_partite(&self) -> Option<Vec<VertexSet>> {
        let comp = self.complement();
        let classes = comp.components();
        for class in &classes {
            for &i in class {
                if comp.adj[i].len() + 1 != class.len() {
                    return None;
                }
            }
        }
        Some(classes)
    }

    /// True when every pair of distinct vertices is adjacent.
    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.m * (self.m - 1) / 2
    }
}

/// Vertices incident to at least one edge.
pub fn non_isolated(g: &InteractionGraph) -> VertexSet {
    g.edges().flat_map(|(i, j)| [i, j]).collect()
}
