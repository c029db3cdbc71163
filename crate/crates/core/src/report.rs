//! Machine-readable summaries shared by the CLI. Field names are stable within a major version.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::classify::ClassificationOutcome;
use crate::duality::{extract_splitting_set, twist_all, SPLIT_TOL};
use crate::error::Result;
use crate::exec::Exec;
use crate::model::CostModel;
use crate::scalar::{format_scalar, Mode, Scalar};
use crate::solve::{SolveResult, SolveStats};
use crate::verify::{check_monge, probe_uniqueness_with, pushforward_holds, FEAS_TOL, MONGE_TOL};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport<'a> {
    pub schema: u32,
    pub m: usize,
    pub edges: usize,
    #[serde(flatten)]
    pub outcome: &'a ClassificationOutcome,
}

impl<'a> ClassifyReport<'a> {
    pub fn new(m: usize, edges: usize, outcome: &'a ClassificationOutcome) -> Self {
        ClassifyReport {
            schema: SCHEMA_VERSION,
            m,
            edges,
            outcome,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitSummary {
    pub atom: usize,
    pub dominant_share: f64,
    /// `(partner tuple, mass)` pairs, heaviest first; masses as exact strings.
    pub masses: Vec<(Vec<usize>, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MongeSummary {
    pub is_monge: bool,
    pub map: Option<BTreeMap<usize, Vec<usize>>>,
    pub pushforward_ok: Option<bool>,
    pub worst_split: Option<SplitSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessSummary {
    pub unique: bool,
    pub probes_used: usize,
    pub second_plan_support: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub schema: u32,
    pub mode: Mode,
    pub m: usize,
    pub dims: Vec<usize>,
    /// Exact value (`p/q` in rational mode).
    pub value: String,
    pub value_f64: f64,
    pub dual_value: String,
    pub duality_gap: String,
    pub dual_feasible: bool,
    pub support_size: usize,
    pub splitting_set_size: usize,
    pub twist_injective: bool,
    pub monge: MongeSummary,
    pub uniqueness: UniquenessSummary,
    pub stats: SolveStats,
}

/// Runs the post-solve checks and collects them into one record.
pub fn summarize_solve<S: Scalar>(
    cm: &CostModel<S>,
    sol: &SolveResult<S>,
    probes: usize,
    seed: u64,
    exec: Exec,
) -> Result<SolveSummary> {
    let mv = check_monge(&sol.coupling, MONGE_TOL);
    let pushforward_ok = mv.map.as_ref().map(|m| pushforward_holds(m, cm, FEAS_TOL));
    let uv = probe_uniqueness_with(cm, sol, probes, seed, exec)?;
    let w = extract_splitting_set(&sol.duals, cm, SPLIT_TOL, exec)?;
    let dual_value = sol.duals.objective(cm);
    Ok(SolveSummary {
        schema: SCHEMA_VERSION,
        mode: S::MODE,
        m: cm.m(),
        dims: cm.shape().dims().to_vec(),
        value: format_scalar(&sol.value),
        value_f64: sol.value.to_f64(),
        duality_gap: format_scalar(&(dual_value.clone() - sol.value.clone())),
        dual_value: format_scalar(&dual_value),
        dual_feasible: sol.duals.is_feasible(cm, FEAS_TOL, exec)?,
        support_size: sol.coupling.len(),
        splitting_set_size: w.len(),
        twist_injective: twist_all(&w, cm),
        monge: MongeSummary {
            is_monge: mv.is_monge,
            map: mv.map,
            pushforward_ok,
            worst_split: mv.worst_split.map(|s| SplitSummary {
                atom: s.atom,
                dominant_share: s.dominant_share,
                masses: s.masses.iter().map(|(t, w)| (t.clone(), format_scalar(w))).collect(),
            }),
        },
        uniqueness: UniquenessSummary {
            unique: uv.unique,
            probes_used: uv.probes_used,
            second_plan_support: uv.second_plan.map(|p| p.len()),
        },
        stats: sol.stats,
    })
}
