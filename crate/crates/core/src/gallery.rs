//! Embedded fixtures: the named graphs of the figures and examples, with expected verdicts.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;

use crate::classify::{classify, RegularityProfile, Rule, Verdict};
use crate::error::Result;
use crate::graph::{complete, cocktail_party, cycle, fan, inner_hub, star, InteractionGraph, VertexSet};

/// What a fixture must classify as.
#[derive(Debug, Clone, Serialize)]
pub struct Expectation {
    pub verdict: Verdict,
    /// The winning rule or one of the matched rules must be listed here (empty: any).
    pub rules: Vec<Rule>,
    pub required_ac: Option<Vec<usize>>,
    /// Expected inner hub of the whole graph, when the fixture pins one.
    pub hub: Option<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub graph: InteractionGraph,
    pub profile: RegularityProfile,
    pub expect: Expectation,
}

#[derive(Debug, Clone, Serialize)]
pub struct GalleryRow {
    pub name: String,
    pub m: usize,
    pub ac: Vec<usize>,
    pub verdict: Verdict,
    pub rule: Option<Rule>,
    pub matched_rules: Vec<Rule>,
    pub required_ac: Vec<usize>,
    pub expected: Expectation,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GalleryReport {
    pub rows: Vec<GalleryRow>,
    pub mismatches: usize,
    pub elapsed_ms: f64,
}

/// Graph whose edges are exactly those of the given cliques.
pub fn from_cliques(m: usize, cliques: &[&[usize]]) -> InteractionGraph {
    let mut edges = BTreeSet::new();
    for c in cliques {
        for (x, &i) in c.iter().enumerate() {
            for &j in &c[x + 1..] {
                edges.insert((i.min(j), i.max(j)));
            }
        }
    }
    InteractionGraph::new(m, edges).expect("fixture cliques are valid")
}

fn graph(m: usize, edges: &[(usize, usize)]) -> InteractionGraph {
    InteractionGraph::new(m, edges.iter().copied()).expect("fixture edges are valid")
}

fn complete_multipartite(m: usize, classes: &[&[usize]]) -> InteractionGraph {
    complete(m)
        .extract(&from_cliques(m, classes))
        .expect("classes are cliques of the complete graph")
}

pub fn example_2_1() -> InteractionGraph {
    from_cliques(10, &[&[6, 7, 8, 9], &[4, 5, 6, 7, 8], &[1, 2, 3, 6, 7, 8, 10]])
}

pub fn example_2_2() -> InteractionGraph {
    from_cliques(
        16,
        &[
            &[6, 7, 8, 9],
            &[4, 5, 6, 7, 8],
            &[1, 2, 3, 6, 7, 8, 10],
            &[4, 5, 14],
            &[4, 5, 15, 16],
            &[4, 5, 11, 12, 13],
        ],
    )
}

/// The five-vertex graph motivating the gluing results.
pub fn example_4_1() -> InteractionGraph {
    graph(5, &[(1, 2), (1, 3), (1, 5), (2, 3), (3, 4)])
}

pub fn k33() -> InteractionGraph {
    complete_multipartite(6, &[&[1, 3, 5], &[2, 4, 6]])
}

pub fn k44() -> InteractionGraph {
    complete_multipartite(8, &[&[1, 3, 5, 7], &[2, 4, 6, 8]])
}

pub fn bipartite_6_4() -> InteractionGraph {
    complete_multipartite(10, &[&[1, 2, 3, 4, 5, 10], &[6, 7, 8, 9]])
}

pub fn k122() -> InteractionGraph {
    complete_multipartite(5, &[&[5], &[1, 3], &[2, 4]])
}

pub fn k112() -> InteractionGraph {
    complete_multipartite(4, &[&[2], &[4], &[1, 3]])
}

pub fn k222() -> InteractionGraph {
    complete_multipartite(6, &[&[1, 3], &[2, 5], &[4, 6]])
}

/// `C_20` minus four cliques sharing the hub `{14, 15, 16}`.
pub fn c20_extraction() -> InteractionGraph {
    let s = from_cliques(
        20,
        &[
            &[1, 14, 15, 16, 17, 18, 19, 20],
            &[9, 10, 11, 12, 13, 14, 15, 16],
            &[6, 14, 15, 16],
            &[4, 14, 15, 16],
        ],
    );
    complete(20).extract(&s).expect("S is a subgraph")
}

/// Five maximal cliques sharing the hub `{2, 3, 4}`.
pub fn hub_graph_13() -> InteractionGraph {
    from_cliques(
        13,
        &[
            &[1, 2, 3, 4, 7],
            &[2, 3, 4, 6, 8],
            &[2, 3, 4, 11, 12],
            &[2, 3, 4, 10, 13],
            &[2, 3, 4, 5, 9],
        ],
    )
}

/// The six-vertex path `3-7-1-6-5-4`, relabelled onto `1..6` by `3→2, 4→3, 5→4, 6→5, 7→6`.
pub fn path_fig() -> InteractionGraph {
    graph(6, &[(2, 6), (1, 6), (1, 5), (4, 5), (3, 4)])
}

pub fn tree_fig() -> InteractionGraph {
    graph(
        10,
        &[(1, 7), (3, 7), (1, 6), (5, 6), (4, 5), (1, 2), (6, 9), (8, 9), (8, 10)],
    )
}

/// Two isolated vertices joined to a 5-cycle.
pub fn join_fig() -> InteractionGraph {
    graph(
        7,
        &[
            (6, 7),
            (4, 7),
            (1, 6),
            (5, 7),
            (4, 5),
            (3, 4),
            (2, 3),
            (2, 7),
            (3, 7),
            (5, 6),
            (1, 2),
            (1, 3),
            (1, 4),
            (1, 5),
            (2, 6),
        ],
    )
}

fn fixture(
    name: &'static str,
    graph: InteractionGraph,
    ac: &[usize],
    verdict: Verdict,
    rules: &[Rule],
    required: Option<&[usize]>,
) -> Fixture {
    let all: Vec<usize>;
    let ac = if ac.is_empty() && verdict == Verdict::Unknown {
        all = graph.vertices().collect();
        &all[..]
    } else {
        ac
    };
    Fixture {
        name,
        profile: RegularityProfile::ac(graph.m(), ac.iter().copied()).expect("fixture profile is valid"),
        graph,
        expect: Expectation {
            verdict,
            rules: rules.to_vec(),
            required_ac: required.map(<[usize]>::to_vec),
            hub: None,
        },
    }
}

/// Every embedded fixture. Fixtures with an empty AC list and an `Unknown` verdict are run with
/// every marginal declared absolutely continuous.
pub fn fixtures() -> Vec<Fixture> {
    use Rule::*;
    use Verdict::*;
    let mut ex21 = fixture("example-2.1", example_2_1(), &[1, 6], MongeUnique, &[Thm41], Some(&[1, 6]));
    ex21.expect.hub = Some(vec![6, 7, 8]);
    let mut hub13 = fixture("hub-graph-13", hub_graph_13(), &[1, 2], MongeUnique, &[Thm41], Some(&[1, 2]));
    hub13.expect.hub = Some(vec![2, 3, 4]);
    vec![
        fixture("C7-complete", complete(7), &[1], MongeUnique, &[Thm41], Some(&[1])),
        fixture("cycle-4", cycle(4), &[1, 4], MongeUnique, &[Thm31Ii], Some(&[1, 4])),
        fixture("cycle-5", cycle(5), &[1, 2, 3, 4, 5], Negative, &[CycleCited], None),
        fixture("cycle-7", cycle(7), &[1], Negative, &[CycleCited], None),
        ex21,
        fixture("example-2.2", example_2_2(), &[1, 4, 6], MongeUnique, &[Prop42], Some(&[1, 4, 6])),
        fixture("K3,3", k33(), &[1, 2], MongeUnique, &[Thm31Ii], Some(&[1, 2])),
        fixture("K4,4", k44(), &[1, 2], MongeUnique, &[Thm31Ii], Some(&[1, 2])),
        fixture("K6,4", bipartite_6_4(), &[1, 6], MongeUnique, &[Thm31Ii], Some(&[1, 6])),
        fixture("K1,2,2", k122(), &[1, 2], MongeUnique, &[Thm31Ii, Cor32], Some(&[1, 2])),
        fixture("K1,1,2", k112(), &[1, 2], MongeUnique, &[Thm31Ii, Cor32], Some(&[1, 2])),
        fixture("K2,2,2", k222(), &[1, 2], MongeUnique, &[Thm31Ii, Cor32], Some(&[1, 2])),
        fixture("cocktail-party-12", cocktail_party(12), &[1, 3], MongeUnique, &[Cor32], Some(&[1, 3])),
        fixture("C20-extraction", c20_extraction(), &[1, 2], MongeUnique, &[Thm31Ii], Some(&[1, 2])),
        fixture("star-center-7", star(7, 7), &[1, 7], MongeUnique, &[Thm41], Some(&[1, 7])),
        fixture("star-center-1", star(7, 1), &[1], MongeUnique, &[Thm41], Some(&[1])),
        hub13,
        fixture("path-6", path_fig(), &[1, 4, 5, 6], MongeUnique, &[Prop43], Some(&[1, 4, 5, 6])),
        fixture("tree-10", tree_fig(), &[1, 5, 6, 7, 8, 9], MongeUnique, &[Prop43], Some(&[1, 5, 6, 7, 8, 9])),
        fixture("example-4.1", example_4_1(), &[1, 3], MongeUnique, &[Prop42], Some(&[1, 3])),
        fixture("fan-1-1", fan(1, 1), &[1], MongeUnique, &[Thm31I], Some(&[1])),
        fixture("fan-1-2", fan(1, 2), &[1], MongeUnique, &[Thm31I], Some(&[1])),
        fixture("fan-1-3", fan(1, 3), &[1], MongeUnique, &[Thm31I], Some(&[1])),
        fixture("fan-1-4", fan(1, 4), &[], Unknown, &[Prop61], None),
        fixture("fan-1-6", fan(1, 6), &[], Unknown, &[Prop61], None),
        fixture("fan-2-4", fan(2, 4), &[], Unknown, &[Prop61], None),
        fixture("fan-2-5", fan(2, 5), &[], Unknown, &[Prop61], None),
        fixture("join-2-C5", join_fig(), &[], Unknown, &[Lemma62], None),
        fixture(
            "two-disjoint-edges",
            InteractionGraph::new(4, [(1, 2), (3, 4)]).expect("valid"),
            &[],
            Negative,
            &[Prop211],
            None,
        ),
    ]
}

fn row(f: &Fixture) -> Result<GalleryRow> {
    let out = classify(&f.graph, &f.profile)?;
    let rule_ok = f.expect.rules.is_empty()
        || f
            .expect
            .rules
            .iter()
            .any(|r| out.rule == Some(*r) || out.matched_rules.contains(r));
    let req_ok = f.expect.required_ac.as_ref().is_none_or(|r| *r == out.required_ac);
    let hub_ok = match &f.expect.hub {
        None => true,
        Some(h) => inner_hub(&f.graph)?.hub == Some(h.iter().copied().collect::<VertexSet>()),
    };
    Ok(GalleryRow {
        name: f.name.to_string(),
        m: f.graph.m(),
        ac: f.profile.ac.iter().copied().collect(),
        ok: out.verdict == f.expect.verdict && rule_ok && req_ok && hub_ok,
        verdict: out.verdict,
        rule: out.rule,
        matched_rules: out.matched_rules,
        required_ac: out.required_ac,
        expected: f.expect.clone(),
    })
}

/// Classifies every fixture and compares with its expectation.
pub fn run_gallery() -> Result<GalleryReport> {
    let start = Instant::now();
    let rows = fixtures().iter().map(row).collect::<Result<Vec<_>>>()?;
    let mismatches = rows.iter().filter(|r| !r.ok).count();
    Ok(GalleryReport {
        rows,
        mismatches,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
