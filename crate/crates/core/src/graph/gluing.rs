//! Decompositions of a graph into hub graphs glued on shared maximal cliques.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::cliques::{hub_of_cliques, maximal_cliques, CliqueSet, HubResult};
use super::{InteractionGraph, VertexSet};
use crate::error::{MmotError, Result};

const MAX_CLIQUES: usize = 20;
const MAX_PARTS: usize = 10;
const MAX_CANDIDATES: usize = 4096;
const MAX_NODES: usize = 200_000;
const MAX_RESULTS: usize = 256;

/// One hub graph of a decomposition: the subgraph induced on `vertices`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingPart {
    pub vertices: VertexSet,
    pub hub: HubResult,
}

impl GluingPart {
    /// Hub of the part; empty when absent.
    pub fn hub_set(&self) -> VertexSet {
        self.hub.hub.clone().unwrap_or_default()
    }
}

/// Two parts glued on a clique maximal in both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaEdge {
    pub a: usize,
    pub b: usize,
    pub clique: VertexSet,
}

/// Parts plus the meta-graph whose edges are gluings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingDecomposition {
    pub parts: Vec<GluingPart>,
    pub meta_edges: Vec<MetaEdge>,
}

fn part_of(g: &InteractionGraph, vertices: VertexSet) -> Result<GluingPart> {
    let (sub, labels) = g.induced(&vertices);
    let local = maximal_cliques(&sub)?;
    let mut cliques: Vec<VertexSet> = local
        .cliques
        .iter()
        .map(|c| c.iter().map(|&v| labels[v - 1]).collect())
        .collect();
    cliques.sort();
    let hub = hub_of_cliques(&cliques);
    Ok(GluingPart {
        vertices,
        hub: HubResult {
            hub,
            cliques: CliqueSet { cliques },
        },
    })
}

fn meta_edges_of(parts: &[GluingPart]) -> Vec<MetaEdge> {
    let mut out = Vec::new();
    for a in 0..parts.len() {
        for b in a + 1..parts.len() {
            let inter: VertexSet = parts[a].vertices.intersection(&parts[b].vertices).copied().collect();
            if inter.is_empty() {
                continue;
            }
            let shared = parts[a].hub.cliques.cliques.contains(&inter)
                && parts[b].hub.cliques.cliques.contains(&inter);
            if shared {
                out.push(MetaEdge { a, b, clique: inter });
            }
        }
    }
    out
}

impl GluingDecomposition {
    /// Builds a decomposition from part vertex sets; errors when the parts do not cover `g`.
    pub fn from_parts(g: &InteractionGraph, parts: &[VertexSet]) -> Result<Self> {
        if parts.is_empty() {
            return Err(MmotError::input("gluing hint has no parts"));
        }
        let mut covered_vertices = VertexSet::new();
        let mut covered_edges = BTreeSet::new();
        for (k, p) in parts.iter().enumerate() {
            if p.is_empty() {
                return Err(MmotError::input(format!("gluing hint part {} is empty", k + 1)));
            }
            if let Some(&v) = p.iter().find(|&&v| v == 0 || v > g.m()) {
                return Err(MmotError::input(format!("gluing hint vertex {v} outside 1..{}", g.m())));
            }
            covered_vertices.extend(p.iter().copied());
            covered_edges.extend(g.induced_edges(p));
        }
        if covered_vertices.len() != g.m() {
            return Err(MmotError::input("gluing hint parts do not cover every vertex"));
        }
        if covered_edges.len() != g.edge_count() {
            return Err(MmotError::input("gluing hint parts do not cover every edge"));
        }
        let parts = parts
            .iter()
            .map(|p| part_of(g, p.clone()))
            .collect::<Result<Vec<_>>>()?;
        let meta_edges = meta_edges_of(&parts);
        Ok(GluingDecomposition { parts, meta_edges })
    }

    /// Checks the structural gluing conditions; returns the first failed condition.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let l = self.parts.len();
        for (k, p) in self.parts.iter().enumerate() {
            match &p.hub.hub {
                None => return Err(format!("part {} has no inner hub", k + 1)),
                Some(h) if h.is_empty() => return Err(format!("part {} has an empty inner hub", k + 1)),
                _ => {}
            }
        }
        let hubs: Vec<VertexSet> = self.parts.iter().map(GluingPart::hub_set).collect();
        for a in 0..l {
            for b in a + 1..l {
                if !hubs[a].is_disjoint(&hubs[b]) {
                    return Err(format!("hubs of parts {} and {} intersect", a + 1, b + 1));
                }
                let inter: VertexSet = self.parts[a]
                    .vertices
                    .intersection(&self.parts[b].vertices)
                    .copied()
                    .collect();
                let glued = self.meta_edges.iter().any(|e| e.a == a && e.b == b);
                let hub_of_other = (0..l).any(|c| c != a && c != b && hubs[c] == inter);
                if !(inter.is_empty() || glued || hub_of_other) {
                    return Err(format!(
                        "parts {} and {} intersect in {:?}, which is neither empty, a shared maximal clique, nor another hub",
                        a + 1,
                        b + 1,
                        inter
                    ));
                }
            }
        }
        if !self.is_tree() {
            return Err("meta-graph is not a tree".into());
        }
        Ok(())
    }

    /// True when the meta-graph is connected and acyclic.
    pub fn is_tree(&self) -> bool {
        let l = self.parts.len();
        if self.meta_edges.len() + 1 != l {
            return false;
        }
        let mut seen = vec![false; l];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for e in &self.meta_edges {
                let v = if e.a == u {
                    e.b
                } else if e.b == u {
                    e.a
                } else {
                    continue;
                };
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Index of the part containing vertex `v`, preferring one whose hub contains it.
    pub fn part_containing(&self, v: usize) -> Option<usize> {
        self.parts
            .iter()
            .position(|p| p.hub_set().contains(&v))
            .or_else(|| self.parts.iter().position(|p| p.vertices.contains(&v)))
    }

    /// Part vertex sets, the serialized form of a hint.
    pub fn part_sets(&self) -> Vec<VertexSet> {
        self.parts.iter().map(|p| p.vertices.clone()).collect()
    }
}

/// Parses a hint file: one part per line, whitespace-separated vertex indices.
pub fn parse_gluing_hint(text: &str) -> Result<Vec<VertexSet>> {
    let mut parts = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let mut set = VertexSet::new();
        for tok in line.split_whitespace() {
            let v: usize = tok.parse().map_err(|_| {
                let col = tok.as_ptr() as usize - raw.as_ptr() as usize + 1;
                MmotError::parse(idx + 1, col, format!("`{tok}` is not a vertex index"))
            })?;
            set.insert(v);
        }
        parts.push(set);
    }
    Ok(parts)
}

/// Validates a hint, or searches for a decomposition whose meta-graph is a tree.
///
/// The search is sound but not complete: `None` does not prove that no decomposition exists.
pub fn find_gluing(
    g: &InteractionGraph,
    hint: Option<&GluingDecomposition>,
) -> Result<Option<GluingDecomposition>> {
    match hint {
        Some(h) => {
            let rebuilt = GluingDecomposition::from_parts(g, &h.part_sets())?;
            Ok(rebuilt.validate().ok().map(|_| rebuilt))
        }
        None => Ok(enumerate_gluings(g)?.into_iter().next()),
    }
}

fn mask(set: &VertexSet) -> u64 {
    set.iter().fold(0u64, |acc, &v| acc | (1u64 << (v - 1)))
}

struct Candidate {
    cliques: Vec<usize>,
    vertices: u64,
    hub: u64,
}

fn candidate_parts(cliques: &[u64]) -> Vec<Candidate> {
    let l = cliques.len();
    let mut out = Vec::new();

    fn closed(cliques: &[u64], chosen: &[usize], union: u64) -> bool {
        cliques.iter().enumerate().all(|(q, &qm)| {
            chosen.contains(&q) || chosen.iter().any(|&c| qm & union & !cliques[c] == 0)
        })
    }

    fn dfs(cliques: &[u64], start: usize, chosen: &mut Vec<usize>, hub: u64, union: u64, out: &mut Vec<Candidate>) {
        if out.len() >= MAX_CANDIDATES {
            return;
        }
        for next in start..cliques.len() {
            let c = cliques[next];
            let (new_hub, ok) = match chosen.len() {
                0 => (c, true),
                1 => {
                    let h = cliques[chosen[0]] & c;
                    (h, h != 0)
                }
                _ => (hub, chosen.iter().all(|&k| cliques[k] & c == hub)),
            };
            if !ok {
                continue;
            }
            chosen.push(next);
            let new_union = union | c;
            if closed(cliques, chosen, new_union) {
                out.push(Candidate {
                    cliques: chosen.clone(),
                    vertices: new_union,
                    hub: new_hub,
                });
            }
            dfs(cliques, next + 1, chosen, new_hub, new_union, out);
            chosen.pop();
            if out.len() >= MAX_CANDIDATES {
                return;
            }
        }
    }

    let mut chosen = Vec::new();
    dfs(cliques, 0, &mut chosen, 0, 0, &mut out);
    debug_assert!(out.iter().all(|c| c.cliques.iter().all(|&k| k < l)));
    out
}

struct Search<'a> {
    g: &'a InteractionGraph,
    cands: Vec<Candidate>,
    by_clique: Vec<Vec<usize>>,
    count: Vec<u8>,
    chosen: Vec<usize>,
    nodes: usize,
    seen: BTreeSet<Vec<usize>>,
    found: Vec<GluingDecomposition>,
}

impl Search<'_> {
    fn run(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > MAX_NODES || self.found.len() >= MAX_RESULTS {
            return Ok(());
        }
        let Some(c) = self.count.iter().position(|&k| k == 0) else {
            return self.record();
        };
        if self.chosen.len() == MAX_PARTS {
            return Ok(());
        }
        let used_hubs = self.chosen.iter().fold(0u64, |acc, &p| acc | self.cands[p].hub);
        for idx in 0..self.by_clique[c].len() {
            let p = self.by_clique[c][idx];
            let cand = &self.cands[p];
            if cand.hub & used_hubs != 0 || cand.cliques.iter().any(|&k| self.count[k] >= 2) {
                continue;
            }
            for &k in &self.cands[p].cliques {
                self.count[k] += 1;
            }
            self.chosen.push(p);
            self.run()?;
            self.chosen.pop();
            for &k in &self.cands[p].cliques {
                self.count[k] -= 1;
            }
        }
        Ok(())
    }

    fn record(&mut self) -> Result<()> {
        let mut key = self.chosen.clone();
        key.sort_unstable();
        if !self.seen.insert(key.clone()) {
            return Ok(());
        }
        let sets: Vec<VertexSet> = key
            .iter()
            .map(|&p| {
                let vm = self.cands[p].vertices;
                (0..64).filter(|b| vm >> b & 1 == 1).map(|b| b + 1).collect()
            })
            .collect();
        let dec = GluingDecomposition::from_parts(self.g, &sets)?;
        if dec.validate().is_ok() {
            self.found.push(dec);
        }
        Ok(())
    }
}

/// All decompositions found by the bounded search, fewest parts first.
pub fn enumerate_gluings(g: &InteractionGraph) -> Result<Vec<GluingDecomposition>> {
    let cliques = maximal_cliques(g)?;
    if cliques.cliques.len() > MAX_CLIQUES {
        return Ok(Vec::new());
    }
    let masks: Vec<u64> = cliques.cliques.iter().map(mask).collect();
    let cands = candidate_parts(&masks);
    let mut by_clique = vec![Vec::new(); masks.len()];
    for (i, c) in cands.iter().enumerate() {
        for &k in &c.cliques {
            by_clique[k].push(i);
        }
    }
    let mut search = Search {
        g,
        cands,
        by_clique,
        count: vec![0; masks.len()],
        chosen: Vec::new(),
        nodes: 0,
        seen: BTreeSet::new(),
        found: Vec::new(),
    };
    search.run()?;
    let mut found = search.found;
    found.sort_by(|a, b| {
        a.parts
            .len()
            .cmp(&b.parts.len())
            .then_with(|| a.part_sets().cmp(&b.part_sets()))
    });
    Ok(found)
}
