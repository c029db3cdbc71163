use proptest::prelude::*;

use super::*;
use crate::gallery::{example_2_1, example_4_1, fixtures, join_fig, run_gallery};
use crate::graph::{complete, cycle, fan, star};

fn run(g: &InteractionGraph, ac: &[usize]) -> ClassificationOutcome {
    let profile = RegularityProfile::ac(g.m(), ac.iter().copied()).unwrap();
    let out = classify(g, &profile).unwrap();
    verify_outcome(g, &profile, &out).unwrap();
    out
}

#[test]
fn four_cycle_with_two_regular_marginals() {
    let out = run(&cycle(4), &[1, 4]);
    assert_eq!(out.verdict, Verdict::MongeUnique);
    assert!(out.matched_rules.contains(&Rule::Thm31Ii));
    assert_eq!(out.required_ac[0], 1);
}

#[test]
fn four_cycle_with_one_regular_marginal_is_unknown() {
    let out = run(&cycle(4), &[1]);
    assert_eq!(out.verdict, Verdict::Unknown);
    assert!(!out.diagnostics.is_empty());
    assert!(out.diagnostics[0].message.contains("would apply if"));
    assert_eq!(out.diagnostics[0].missing_ac.len(), 1);
}

#[test]
fn triangle_needs_only_the_first_marginal() {
    let out = run(&complete(3), &[1]);
    assert_eq!(out.verdict, Verdict::MongeUnique);
    assert_eq!(out.rule, Some(Rule::Thm31I));
    assert_eq!(out.required_ac, vec![1]);
}

#[test]
fn hub_example() {
    let out = run(&example_2_1(), &[1, 6]);
    assert_eq!(out.verdict, Verdict::MongeUnique);
    assert_eq!(out.rule, Some(Rule::Thm41));
    assert_eq!(out.required_ac, vec![1, 6]);
}

#[test]
fn star_with_outer_first_vertex() {
    let out = run(&star(7, 7), &[1, 7]);
    assert_eq!(out.rule, Some(Rule::Thm41));
    assert_eq!(out.required_ac, vec![1, 7]);
}

#[test]
fn long_cycles_are_negative() {
    for m in 5..9 {
        let all: Vec<usize> = (1..=m).collect();
        let out = run(&cycle(m), &all);
        assert_eq!(out.verdict, Verdict::Negative);
        assert_eq!(out.rule, Some(Rule::CycleCited));
    }
}

#[test]
fn fans_follow_the_open_question() {
    for (k, n) in [(1, 4), (1, 5), (2, 4), (2, 5), (3, 6)] {
        let g = fan(k, n);
        let all: Vec<usize> = g.vertices().collect();
        let out = run(&g, &all);
        assert_eq!(out.verdict, Verdict::Unknown, "fan({k},{n})");
        assert_eq!(out.rule, Some(Rule::Prop61), "fan({k},{n})");
    }
    for n in 1..4 {
        let out = run(&fan(1, n), &[1]);
        assert_eq!(out.verdict, Verdict::MongeUnique, "fan(1,{n})");
    }
}

#[test]
fn join_of_isolated_pair_and_five_cycle() {
    let g = join_fig();
    let all: Vec<usize> = g.vertices().collect();
    let out = run(&g, &all);
    assert_eq!(out.verdict, Verdict::Unknown);
    assert_eq!(out.rule, Some(Rule::Lemma62));
}

#[test]
fn disconnected_is_negative() {
    let g = InteractionGraph::new(4, [(1, 2), (3, 4)]).unwrap();
    let out = run(&g, &[1, 2, 3, 4]);
    assert_eq!(out.verdict, Verdict::Negative);
    assert_eq!(out.rule, Some(Rule::Prop211));
}

#[test]
fn disconnected_dirac_component_is_not_negative() {
    let g = InteractionGraph::new(3, [(1, 2)]).unwrap();
    let profile = RegularityProfile::new(3, [1], [3]).unwrap();
    let out = classify(&g, &profile).unwrap();
    assert_ne!(out.rule, Some(Rule::Prop211));
}

#[test]
fn missing_edge_with_dirac_rest_is_negative() {
    let g = InteractionGraph::new(3, [(1, 3), (2, 3)]).unwrap();
    let profile = RegularityProfile::new(3, [1, 2], [3]).unwrap();
    let out = classify(&g, &profile).unwrap();
    assert_eq!(out.verdict, Verdict::Negative);
    assert_eq!(out.rule, Some(Rule::Prop212));
    verify_outcome(&g, &profile, &out).unwrap();
}

#[test]
fn gluing_example() {
    let out = run(&example_4_1(), &[1, 3]);
    assert_eq!(out.verdict, Verdict::MongeUnique);
    assert!(matches!(out.rule, Some(Rule::Prop42 | Rule::Prop43)));
}

#[test]
fn bad_profile_is_rejected() {
    assert!(RegularityProfile::new(3, [1, 4], []).is_err());
    assert!(RegularityProfile::new(3, [1, 2], [2]).is_err());
}

#[test]
fn tampered_witness_fails_verification() {
    let g = example_2_1();
    let profile = RegularityProfile::ac(10, [1, 6]).unwrap();
    let mut out = classify(&g, &profile).unwrap();
    if let Witness::InnerHub { hub, .. } = &mut out.witness {
        hub.insert(9);
    }
    assert!(verify_outcome(&g, &profile, &out).is_err());
}

#[test]
fn rule_names_round_trip() {
    for r in Rule::ALL {
        assert_eq!(r.name().parse::<Rule>().unwrap(), r);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, format!("\"{}\"", r.name()));
    }
}

#[test]
fn gallery_has_no_mismatches() {
    let report = run_gallery().unwrap();
    let bad: Vec<_> = report.rows.iter().filter(|r| !r.ok).map(|r| &r.name).collect();
    assert!(bad.is_empty(), "{bad:?}");
    for f in fixtures() {
        let out = classify(&f.graph, &f.profile).unwrap();
        verify_outcome(&f.graph, &f.profile, &out).unwrap();
    }
}

fn arb_graph() -> impl Strategy<Value = InteractionGraph> {
    (2usize..=6).prop_flat_map(|m| {
        let pairs: Vec<(usize, usize)> = (1..=m).flat_map(|i| (i + 1..=m).map(move |j| (i, j))).collect();
        let n = pairs.len();
        proptest::collection::vec(any::<bool>(), n).prop_map(move |keep| {
            let edges = pairs.iter().zip(&keep).filter(|(_, k)| **k).map(|(e, _)| *e);
            InteractionGraph::new(m, edges).unwrap()
        })
    })
}

fn arb_case() -> impl Strategy<Value = (InteractionGraph, Vec<bool>, Vec<usize>)> {
    arb_graph().prop_flat_map(|g| {
        let m = g.m();
        (
            Just(g),
            proptest::collection::vec(any::<bool>(), m),
            Just((2..=m).collect::<Vec<_>>()).prop_shuffle(),
        )
    })
}

fn profile_of(mask: &[bool]) -> RegularityProfile {
    let ac = mask.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i + 1);
    RegularityProfile::ac(mask.len(), ac).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn positive_verdicts_need_the_first_marginal((g, mask, _) in arb_case()) {
        let profile = profile_of(&mask);
        let out = classify(&g, &profile).unwrap();
        if out.verdict == Verdict::MongeUnique {
            prop_assert!(out.required_ac.contains(&1));
            prop_assert!(profile.covers(&out.required_ac.iter().copied().collect()));
        }
        prop_assert!(verify_outcome(&g, &profile, &out).is_ok());
    }

    #[test]
    fn more_regularity_never_loses_a_positive((g, mask, _) in arb_case()) {
        let out = classify(&g, &profile_of(&mask)).unwrap();
        let all = RegularityProfile::ac(g.m(), g.vertices()).unwrap();
        let full = classify(&g, &all).unwrap();
        if out.verdict == Verdict::MongeUnique {
            prop_assert_eq!(full.verdict, Verdict::MongeUnique);
            prop_assert!(full.required_ac.len() <= out.required_ac.len());
        }
    }

    #[test]
    fn relabelling_other_vertices_preserves_the_verdict((g, mask, tail) in arb_case()) {
        let mut perm = vec![1];
        perm.extend(tail);
        let h = g.relabel(&perm).unwrap();
        let mut moved = vec![false; mask.len()];
        for (v, &b) in mask.iter().enumerate() {
            moved[perm[v] - 1] = b;
        }
        let a = classify(&g, &profile_of(&mask)).unwrap();
        let b = classify(&h, &profile_of(&moved)).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(a.required_ac.len(), b.required_ac.len());
    }
}
