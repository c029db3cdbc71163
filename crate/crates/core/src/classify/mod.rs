//! Classification of interaction graphs into Monge/uniqueness classes.

mod rules;
mod types;

use std::collections::BTreeSet;

pub use types::{Candidate, ClassificationOutcome, Diagnostic, RegularityProfile, Rule, Verdict, Witness};

use crate::error::{MmotError, Result};
use crate::graph::InteractionGraph;

/// Result of a single rule check: the rule, its witness and the AC demands.
pub type RuleMatch = (Rule, Witness, BTreeSet<usize>);

const MAX_DIAGNOSTICS: usize = 8;

fn first_fitting(mut cands: Vec<Candidate>, profile: &RegularityProfile) -> Option<RuleMatch> {
    cands.sort_by_key(Candidate::rank);
    cands
        .into_iter()
        .find(|c| profile.covers(&c.required_ac))
        .map(|c| (c.rule, c.witness, c.required_ac))
}

pub fn check_thm31(g: &InteractionGraph, profile: &RegularityProfile) -> Result<Option<RuleMatch>> {
    Ok(first_fitting(rules::thm31_candidates(g)?, profile))
}

pub fn check_cor32(g: &InteractionGraph, profile: &RegularityProfile) -> Option<RuleMatch> {
    first_fitting(rules::cor32_candidates(g), profile)
}

pub fn check_thm41(g: &InteractionGraph, profile: &RegularityProfile) -> Result<Option<RuleMatch>> {
    Ok(first_fitting(rules::thm41_candidates(g)?, profile))
}

pub fn check_gluing(g: &InteractionGraph, profile: &RegularityProfile) -> Result<Option<RuleMatch>> {
    Ok(first_fitting(rules::gluing_candidates(g, profile)?, profile))
}

/// Negative or open-question certificates, in the order they are tried.
pub fn check_negative(g: &InteractionGraph, profile: &RegularityProfile) -> Option<(Rule, Witness)> {
    if let Some(c) = rules::decisive_negative(g, profile) {
        return Some((c.rule, c.witness));
    }
    if let Some(order) = rules::long_cycle(g) {
        return Some((Rule::CycleCited, Witness::Cycle { order }));
    }
    rules::join_pattern(g).map(|c| (c.rule, c.witness))
}

fn check_profile(g: &InteractionGraph, profile: &RegularityProfile) -> Result<()> {
    RegularityProfile::new(g.m(), profile.ac.iter().copied(), profile.dirac.iter().copied()).map(|_| ())
}

fn set_text(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(|i| format!("μ_{i}")).collect();
    match parts.len() {
        1 => format!("{} were", parts[0]),
        _ => format!("{} were", parts.join(" and ")),
    }
}

fn diagnostics(cands: &[Candidate], profile: &RegularityProfile) -> Vec<Diagnostic> {
    let mut sorted: Vec<&Candidate> = cands.iter().collect();
    sorted.sort_by_key(|c| {
        let missing = c.required_ac.difference(&profile.ac).count();
        (missing, c.rank())
    });
    let mut out: Vec<Diagnostic> = Vec::new();
    for c in sorted {
        let missing: Vec<usize> = c.required_ac.difference(&profile.ac).copied().collect();
        if out.iter().any(|d| d.rule == Some(c.rule) && d.missing_ac == missing) {
            continue;
        }
        let mut message = format!("{} would apply if {} absolutely continuous", c.rule, set_text(&missing));
        let blocked: Vec<String> = missing
            .iter()
            .filter(|v| profile.is_dirac(**v))
            .map(|v| v.to_string())
            .collect();
        if !blocked.is_empty() {
            message.push_str(&format!(" (declared Dirac: {})", blocked.join(", ")));
        }
        out.push(Diagnostic {
            rule: Some(c.rule),
            missing_ac: missing,
            message,
        });
        if out.len() == MAX_DIAGNOSTICS {
            break;
        }
    }
    if out.is_empty() {
        out.push(Diagnostic {
            rule: None,
            missing_ac: Vec::new(),
            message: "no positive rule matches the graph structure".into(),
        });
    }
    out
}

fn outcome(verdict: Verdict, c: Option<Candidate>, diagnostics: Vec<Diagnostic>, matched: Vec<Rule>) -> ClassificationOutcome {
    match c {
        Some(c) => ClassificationOutcome {
            verdict,
            rule: Some(c.rule),
            required_ac: c.required_ac.into_iter().collect(),
            witness: c.witness,
            diagnostics,
            matched_rules: matched,
        },
        None => ClassificationOutcome {
            verdict,
            rule: None,
            required_ac: Vec::new(),
            witness: Witness::None,
            diagnostics,
            matched_rules: matched,
        },
    }
}

/// Dispatches over every check: decisive negatives, then positive rules (fewest AC demands
/// wins, ties by rule order), then cited negatives and open-question certificates.
pub fn classify(g: &InteractionGraph, profile: &RegularityProfile) -> Result<ClassificationOutcome> {
    check_profile(g, profile)?;
    if let Some(neg) = rules::decisive_negative(g, profile) {
        return Ok(outcome(Verdict::Negative, Some(neg), Vec::new(), Vec::new()));
    }
    let mut cands = rules::positive_candidates(g, profile)?;
    cands.sort_by_key(Candidate::rank);
    let (fit, miss): (Vec<Candidate>, Vec<Candidate>) = cands.into_iter().partition(|c| profile.covers(&c.required_ac));
    if let Some(best) = fit.first().cloned() {
        let mut matched: Vec<Rule> = fit.iter().map(|c| c.rule).collect::<BTreeSet<_>>().into_iter().collect();
        matched.sort();
        return Ok(outcome(Verdict::MongeUnique, Some(best), Vec::new(), matched));
    }
    if let Some(order) = rules::long_cycle(g) {
        let c = Candidate::new(Rule::CycleCited, Witness::Cycle { order }, []);
        return Ok(outcome(Verdict::Negative, Some(c), Vec::new(), Vec::new()));
    }
    if let Some(c) = rules::join_pattern(g) {
        return Ok(outcome(Verdict::Unknown, Some(c), diagnostics(&miss, profile), Vec::new()));
    }
    Ok(outcome(Verdict::Unknown, None, diagnostics(&miss, profile), Vec::new()))
}

/// Independently re-checks the hypotheses behind an outcome's rule and witness.
pub fn verify_outcome(g: &InteractionGraph, profile: &RegularityProfile, out: &ClassificationOutcome) -> Result<()> {
    let Some(rule) = out.rule else {
        return match out.verdict {
            Verdict::Unknown => Ok(()),
            v => Err(MmotError::input(format!("{v} outcome without a rule"))),
        };
    };
    let required: BTreeSet<usize> = out.required_ac.iter().copied().collect();
    if out.verdict == Verdict::MongeUnique && !profile.covers(&required) {
        return Err(MmotError::input("required AC set is not covered by the profile"));
    }
    rules::verify_witness(g, rule, &out.witness, &required).map_err(MmotError::Input)
}

#[cfg(test)]
mod tests;
