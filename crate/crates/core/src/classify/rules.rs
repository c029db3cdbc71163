//! Structural hypothesis checks for each named result.

use std::collections::BTreeSet;

use super::types::{Candidate, RegularityProfile, Rule, Witness};
use crate::error::Result;
use crate::graph::{enumerate_gluings, inner_hub, non_isolated, GluingDecomposition, InteractionGraph, VertexSet};

/// Hub of `S = C_m \ g` computed on its non-isolated vertices.
fn extraction_hub(g: &InteractionGraph) -> Result<Option<(VertexSet, VertexSet, bool)>> {
    let s = g.complement();
    let support = non_isolated(&s);
    if support.is_empty() {
        return Ok(Some((support, VertexSet::new(), true)));
    }
    let (sub, labels) = s.induced(&support);
    let hub = inner_hub(&sub)?;
    Ok(hub.hub.map(|h| {
        let mapped = h.iter().map(|&v| labels[v - 1]).collect();
        (support, mapped, sub.is_complete())
    }))
}

pub(crate) fn thm31_candidates(g: &InteractionGraph) -> Result<Vec<Candidate>> {
    if !g.is_connected() {
        return Ok(Vec::new());
    }
    let Some((support, hub, complete)) = extraction_hub(g)? else {
        return Ok(Vec::new());
    };
    let removed: Vec<(usize, usize)> = g.complement().edges().collect();
    let witness = |p: Option<usize>| Witness::Extraction {
        removed_edges: removed.clone(),
        s_vertices: support.clone(),
        hub: hub.clone(),
        s_complete: complete,
        p,
    };
    let mut out = Vec::new();
    if !support.contains(&1) {
        out.push(Candidate::new(Rule::Thm31I, witness(None), [1]));
    }
    for &p in g.nbrs(1) {
        if hub.is_subset(g.nbrs(p)) && (complete || !hub.contains(&1)) {
            out.push(Candidate::new(Rule::Thm31Ii, witness(Some(p)), [1, p]));
        }
    }
    Ok(out)
}

pub(crate) fn cor32_candidates(g: &InteractionGraph) -> Vec<Candidate> {
    let m = g.m();
    if !g.is_connected() || g.vertices().any(|v| g.degree(v) + 2 < m) {
        return Vec::new();
    }
    let missing: Vec<(usize, usize)> = g.complement().edges().collect();
    if g.degree(1) + 1 == m {
        return vec![Candidate::new(
            Rule::Cor32,
            Witness::OneMissingEdge {
                missing_edges: missing,
                i: None,
            },
            [1],
        )];
    }
    g.nbrs(1)
        .iter()
        .map(|&i| {
            Candidate::new(
                Rule::Cor32,
                Witness::OneMissingEdge {
                    missing_edges: missing.clone(),
                    i: Some(i),
                },
                [1, i],
            )
        })
        .collect()
}

pub(crate) fn thm41_candidates(g: &InteractionGraph) -> Result<Vec<Candidate>> {
    let hr = inner_hub(g)?;
    let Some(hub) = hr.hub else {
        return Ok(Vec::new());
    };
    let witness = |p: usize| Witness::InnerHub {
        hub: hub.clone(),
        cliques: hr.cliques.cliques.clone(),
        p,
    };
    if hub.contains(&1) {
        return Ok(vec![Candidate::new(Rule::Thm41, witness(1), [1])]);
    }
    Ok(hub.iter().map(|&p| Candidate::new(Rule::Thm41, witness(p), [1, p])).collect())
}

/// Gluing cliques touching part `k`.
fn gluing_cliques(dec: &GluingDecomposition, k: usize) -> Vec<&VertexSet> {
    dec.meta_edges
        .iter()
        .filter(|e| e.a == k || e.b == k)
        .map(|e| &e.clique)
        .collect()
}

/// Vertex 1 lies in the root's hub, or in a maximal clique of the root that is not a gluing clique.
pub(crate) fn root_condition(dec: &GluingDecomposition, root: usize) -> bool {
    let part = &dec.parts[root];
    if !part.vertices.contains(&1) {
        return false;
    }
    if part.hub_set().contains(&1) {
        return true;
    }
    let glued = gluing_cliques(dec, root);
    part.hub
        .cliques
        .cliques
        .iter()
        .any(|c| c.contains(&1) && !glued.contains(&c))
}

/// Prop 4.2 shape: the meta-graph is a star centred at the root and leaves meet in the root's hub.
pub(crate) fn is_star_at(dec: &GluingDecomposition, root: usize) -> bool {
    if dec.meta_edges.iter().any(|e| e.a != root && e.b != root) {
        return false;
    }
    let hub = dec.parts[root].hub_set();
    let leaves: Vec<usize> = (0..dec.parts.len()).filter(|&k| k != root).collect();
    leaves.iter().enumerate().all(|(x, &a)| {
        leaves[x + 1..].iter().all(|&b| {
            let inter: VertexSet = dec.parts[a]
                .vertices
                .intersection(&dec.parts[b].vertices)
                .copied()
                .collect();
            inter == hub
        })
    })
}

fn pick_p(hub: &VertexSet, profile: Option<&RegularityProfile>) -> usize {
    if hub.contains(&1) {
        return 1;
    }
    profile
        .and_then(|pr| hub.iter().copied().find(|v| pr.is_ac(*v)))
        .or_else(|| hub.iter().next().copied())
        .expect("validated hubs are nonempty")
}

pub(crate) fn gluing_candidates(g: &InteractionGraph, profile: &RegularityProfile) -> Result<Vec<Candidate>> {
    let mut out: Vec<Candidate> = Vec::new();
    for dec in enumerate_gluings(g)? {
        if dec.parts.len() < 2 || dec.validate().is_err() {
            continue;
        }
        for root in 0..dec.parts.len() {
            if !root_condition(&dec, root) {
                continue;
            }
            let rule = if is_star_at(&dec, root) { Rule::Prop42 } else { Rule::Prop43 };
            for pr in [Some(profile), None] {
                let p: Vec<usize> = dec.parts.iter().map(|part| pick_p(&part.hub_set(), pr)).collect();
                let required: BTreeSet<usize> = std::iter::once(1).chain(p.iter().copied()).collect();
                let cand = Candidate {
                    rule,
                    witness: Witness::Gluing {
                        decomposition: dec.clone(),
                        root,
                        p,
                    },
                    required_ac: required,
                };
                if !out.contains(&cand) {
                    out.push(cand);
                }
            }
        }
    }
    Ok(out)
}

/// All positive candidates, fitting the profile or not.
pub(crate) fn positive_candidates(g: &InteractionGraph, profile: &RegularityProfile) -> Result<Vec<Candidate>> {
    let mut all = thm31_candidates(g)?;
    all.extend(cor32_candidates(g));
    all.extend(thm41_candidates(g)?);
    all.extend(gluing_candidates(g, profile)?);
    Ok(all)
}

/// Prop 2.1 certificates, which are decisive whenever their profile hypotheses hold.
pub(crate) fn decisive_negative(g: &InteractionGraph, profile: &RegularityProfile) -> Option<Candidate> {
    if !g.is_connected() {
        let comp = g.component_of(1);
        if let Some(v) = g.vertices().find(|v| !comp.contains(v) && !profile.is_dirac(*v)) {
            return Some(Candidate::new(
                Rule::Prop211,
                Witness::Disconnected {
                    component_of_1: comp,
                    vertex: v,
                },
                [],
            ));
        }
    }
    if profile.is_dirac(1) {
        return None;
    }
    (2..=g.m())
        .filter(|&i| !g.has_edge(1, i) && !profile.is_dirac(i))
        .find(|&i| (2..=g.m()).all(|j| j == i || profile.is_dirac(j)))
        .map(|i| Candidate::new(Rule::Prop212, Witness::MissingEdge { i }, []))
}

/// Vertex order around the cycle when `g` is a single cycle on `m ≥ 5` vertices.
pub(crate) fn long_cycle(g: &InteractionGraph) -> Option<Vec<usize>> {
    let m = g.m();
    if m < 5 || !g.is_connected() || g.vertices().any(|v| g.degree(v) != 2) {
        return None;
    }
    let mut order = vec![1];
    let mut prev = 0;
    let mut cur = 1;
    while order.len() < m {
        let next = *g.nbrs(cur).iter().find(|&&w| w != prev)?;
        order.push(next);
        prev = cur;
        cur = next;
    }
    Some(order)
}

/// Sequence of a Hamiltonian path when `g` is a path graph.
fn path_order(g: &InteractionGraph) -> Option<Vec<usize>> {
    let m = g.m();
    if !g.is_connected() || g.edge_count() + 1 != m {
        return None;
    }
    let ends: Vec<usize> = g.vertices().filter(|&v| g.degree(v) <= 1).collect();
    if g.vertices().any(|v| g.degree(v) > 2) {
        return None;
    }
    let mut order = vec![ends[0]];
    let mut prev = 0;
    while order.len() < m {
        let cur = *order.last().expect("nonempty");
        let next = *g.nbrs(cur).iter().find(|&&w| w != prev)?;
        prev = cur;
        order.push(next);
    }
    Some(order)
}

/// `g = edgeless(k) + G` with `G` connected and no vertex of `G` dominating it.
pub(crate) fn join_pattern(g: &InteractionGraph) -> Option<Candidate> {
    let comp = g.complement();
    for q in comp.components() {
        if q.len() == g.m() || !comp.induced(&q).0.is_complete() {
            continue;
        }
        let rest: VertexSet = g.vertices().filter(|v| !q.contains(v)).collect();
        let (sub, labels) = g.induced(&rest);
        if !sub.is_connected() || sub.vertices().any(|v| sub.degree(v) + 1 == sub.m()) {
            continue;
        }
        if let Some(order) = path_order(&sub).filter(|o| o.len() >= 4) {
            return Some(Candidate::new(
                Rule::Prop61,
                Witness::Fan {
                    k: q.len(),
                    n: rest.len(),
                    edgeless: q.clone(),
                    path: order.iter().map(|&v| labels[v - 1]).collect(),
                },
                [],
            ));
        }
        return Some(Candidate::new(
            Rule::Lemma62,
            Witness::JoinPattern { edgeless: q, rest },
            [],
        ));
    }
    None
}

/// Re-derives a witness's hypotheses from scratch; `Err` names the first that fails.
pub(crate) fn verify_witness(
    g: &InteractionGraph,
    rule: Rule,
    witness: &Witness,
    required: &BTreeSet<usize>,
) -> std::result::Result<(), String> {
    let need = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(msg.to_string()) };
    match (rule, witness) {
        (
            Rule::Thm31I | Rule::Thm31Ii,
            Witness::Extraction {
                removed_edges,
                s_vertices,
                hub,
                s_complete,
                p,
            },
        ) => {
            need(g.is_connected(), "graph is not connected")?;
            let s = InteractionGraph::new(g.m(), removed_edges.iter().copied()).map_err(|e| e.to_string())?;
            need(s.complement() == *g, "removed edges are not the complement")?;
            need(non_isolated(&s) == *s_vertices, "support of S differs")?;
            let (sub, labels) = s.induced(s_vertices);
            let computed: Option<VertexSet> = if s_vertices.is_empty() {
                Some(VertexSet::new())
            } else {
                inner_hub(&sub)
                    .map_err(|e| e.to_string())?
                    .hub
                    .map(|h| h.iter().map(|&v| labels[v - 1]).collect())
            };
            need(computed.as_ref() == Some(hub), "hub of S differs")?;
            need(s_vertices.is_empty() || sub.is_complete() == *s_complete, "completeness of S differs")?;
            if rule == Rule::Thm31I {
                need(!s_vertices.contains(&1), "vertex 1 lies in S")?;
                need(*required == BTreeSet::from([1]), "required set differs")
            } else {
                let p = p.ok_or("missing p")?;
                need(g.has_edge(1, p), "p is not a neighbour of 1")?;
                need(hub.is_subset(g.nbrs(p)), "hub not inside N(p)")?;
                need(*s_complete || !hub.contains(&1), "vertex 1 in the hub of a non-complete S")?;
                need(*required == BTreeSet::from([1, p]), "required set differs")
            }
        }
        (Rule::Cor32, Witness::OneMissingEdge { missing_edges, i }) => {
            let m = g.m();
            need(g.is_connected(), "graph is not connected")?;
            need(g.vertices().all(|v| g.degree(v) + 2 >= m), "a vertex misses two edges")?;
            need(g.complement().edges().eq(missing_edges.iter().copied()), "missing edges differ")?;
            match i {
                None => need(g.degree(1) + 1 == m && *required == BTreeSet::from([1]), "vertex 1 is not dominating"),
                Some(i) => need(
                    g.has_edge(1, *i) && *required == BTreeSet::from([1, *i]),
                    "i is not a neighbour of 1",
                ),
            }
        }
        (Rule::Thm41, Witness::InnerHub { hub, cliques, p }) => {
            let hr = inner_hub(g).map_err(|e| e.to_string())?;
            need(hr.hub.as_ref() == Some(hub), "inner hub differs")?;
            need(hr.cliques.cliques == *cliques, "maximal cliques differ")?;
            need(hub.contains(p), "p is not in the hub")?;
            need(*required == BTreeSet::from([1, *p]), "required set differs")
        }
        (Rule::Prop42 | Rule::Prop43, Witness::Gluing { decomposition, root, p }) => {
            let rebuilt = GluingDecomposition::from_parts(g, &decomposition.part_sets()).map_err(|e| e.to_string())?;
            need(rebuilt == *decomposition, "decomposition does not rebuild identically")?;
            need(rebuilt.parts.len() >= 2, "fewer than two parts")?;
            rebuilt.validate()?;
            need(*root < rebuilt.parts.len() && root_condition(&rebuilt, *root), "root condition fails")?;
            need(p.len() == rebuilt.parts.len(), "one p per part expected")?;
            need(
                rebuilt.parts.iter().zip(p).all(|(part, q)| part.hub_set().contains(q)),
                "some p is outside its part's hub",
            )?;
            let want: BTreeSet<usize> = std::iter::once(1).chain(p.iter().copied()).collect();
            need(*required == want, "required set differs")?;
            let star = is_star_at(&rebuilt, *root);
            need(star == (rule == Rule::Prop42), "star shape does not match the rule")
        }
        (Rule::Prop211, Witness::Disconnected { component_of_1, vertex }) => {
            need(g.component_of(1) == *component_of_1, "component differs")?;
            need(!component_of_1.contains(vertex), "vertex is reachable from 1")
        }
        (Rule::Prop212, Witness::MissingEdge { i }) => need(*i != 1 && !g.has_edge(1, *i), "edge {1,i} present"),
        (Rule::CycleCited, Witness::Cycle { order }) => need(long_cycle(g).as_ref() == Some(order), "not a long cycle"),
        (Rule::Prop61 | Rule::Lemma62, w) => {
            let again = join_pattern(g).ok_or("join pattern not found")?;
            need(again.rule == rule && again.witness == *w, "join pattern differs")
        }
        _ => Err(format!("witness kind does not match rule {rule}")),
    }
}
