use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bundle::{write_file, ProblemBundle, COUPLING_FILE};
use crate::classify::{classify, RegularityProfile, Rule, Verdict};
use crate::duality::{extract_splitting_set, twist_all, SPLIT_TOL};
use crate::error::{MmotError, Result};
use crate::exec::Exec;
use crate::graph::InteractionGraph;
use crate::marginal::{discretize, Density, DiscreteMarginal};
use crate::model::{var_cap, CostModel, Shape};
use crate::scalar::{Mode, Rational, Scalar};
use crate::solve::solve_kp_with;

use super::monge::{check_monge, MONGE_TOL};
use super::unique::{probe_uniqueness_with, PROBES};

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub graph: InteractionGraph,
    pub profile: RegularityProfile,
    pub trials: usize,
    /// Atoms per non-Dirac marginal.
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub mode: Mode,
    pub density: Density,
    pub probes: usize,
    /// Violating instances are written under `<out_dir>/violations/`.
    pub out_dir: Option<PathBuf>,
    pub exec: Exec,
}

impl ExperimentConfig {
    pub fn new(graph: InteractionGraph, profile: RegularityProfile, trials: usize, n: usize, d: usize, seed: u64) -> Self {
        ExperimentConfig {
            graph,
            profile,
            trials,
            n,
            d,
            seed,
            mode: Mode::Float,
            density: Density::Uniform,
            probes: PROBES,
            out_dir: None,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub graph: InteractionGraph,
    pub profile: RegularityProfile,
    pub trials: usize,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub mode: Mode,
    pub density: Density,
    pub probes: usize,
    pub prediction: Verdict,
    pub rule: Option<Rule>,
    pub monge_count: usize,
    pub unique_count: usize,
    pub twist_count: usize,
    /// Rates are absent when no trial ran.
    pub monge_rate: Option<f64>,
    pub unique_rate: Option<f64>,
    pub twist_rate: Option<f64>,
    /// Wall-clock mean; the only field that varies between identical runs.
    pub mean_solve_ms: Option<f64>,
    pub mean_pivots: Option<f64>,
    /// Trials contradicting the prediction, as bundle paths (or `trial_<t>` when not persisted).
    pub violations: Vec<String>,
}

impl ExperimentReport {
    /// The report with timing removed, for byte-level comparisons.
    pub fn without_timing(&self) -> Self {
        ExperimentReport {
            mean_solve_ms: None,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone)]
struct TrialOutcome {
    monge: bool,
    unique: bool,
    twist: bool,
    solve_ms: f64,
    pivots: usize,
    violation: Option<String>,
}

/// Per-marginal seeds for trial `t`, independent of execution order.
fn trial_seeds(seed: u64, t: usize, m: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64);
    (0..m).map(|_| rng.gen()).collect()
}

fn trial_marginals(cfg: &ExperimentConfig, t: usize) -> Vec<DiscreteMarginal<Rational>> {
    trial_seeds(cfg.seed, t, cfg.graph.m())
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let n = if cfg.profile.is_dirac(i + 1) { 1 } else { cfg.n };
            discretize(cfg.density, n, cfg.d, s)
        })
        .collect()
}

fn is_violation(prediction: Verdict, monge: bool, unique: bool) -> bool {
    match prediction {
        Verdict::MongeUnique => !(monge && unique),
        Verdict::Negative => unique,
        Verdict::Unknown => false,
    }
}

fn run_trial<S: Scalar>(cfg: &ExperimentConfig, prediction: Verdict, t: usize) -> Result<TrialOutcome> {
    let exact = CostModel::new(cfg.graph.clone(), trial_marginals(cfg, t))?;
    let cm: CostModel<S> = exact.convert();
    let start = Instant::now();
    let sol = solve_kp_with(&cm, Exec::Sequential)?;
    let solve_ms = start.elapsed().as_secs_f64() * 1e3;
    let monge = check_monge(&sol.coupling, MONGE_TOL).is_monge;
    let probe_seed = cfg.seed ^ (t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let unique = probe_uniqueness_with(&cm, &sol, cfg.probes, probe_seed, Exec::Sequential)?.unique;
    let w = extract_splitting_set(&sol.duals, &cm, SPLIT_TOL, Exec::Sequential)?;
    let twist = twist_all(&w, &cm);
    let violation = if is_violation(prediction, monge, unique) {
        let name = format!("trial_{t}");
        Some(match &cfg.out_dir {
            Some(dir) => {
                let path = dir.join("violations").join(&name);
                ProblemBundle::from_model(&exact).write(&path)?;
                write_file(&path.join(COUPLING_FILE), &sol.coupling.to_text())?;
                path.display().to_string()
            }
            None => name,
        })
    } else {
        None
    };
    Ok(TrialOutcome {
        monge,
        unique,
        twist,
        solve_ms,
        pivots: sol.stats.pivots,
        violation,
    })
}

fn check_size(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.n == 0 || cfg.d == 0 {
        return Err(MmotError::input("n and d must be positive"));
    }
    let dims: Vec<usize> = (1..=cfg.graph.m())
        .map(|v| if cfg.profile.is_dirac(v) { 1 } else { cfg.n })
        .collect();
    Shape::new(dims).check_cap(var_cap()).map(|_| ())
}

fn rate(count: usize, trials: usize) -> Option<f64> {
    (trials > 0).then(|| count as f64 / trials as f64)
}

/// Solves `trials` seeded instances and compares Monge-ness and uniqueness with the
/// classifier's prediction. Identical configurations give identical reports up to timing.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let outcome = classify(&cfg.graph, &cfg.profile)?;
    check_size(cfg)?;
    let prediction = outcome.verdict;
    let results: Vec<Result<TrialOutcome>> = cfg.exec.map_indices(cfg.trials, |t| match cfg.mode {
        Mode::Float => run_trial::<f64>(cfg, prediction, t),
        Mode::Rational => run_trial::<Rational>(cfg, prediction, t),
    });
    let trials = results.into_iter().collect::<Result<Vec<_>>>()?;
    let count = |f: fn(&TrialOutcome) -> bool| trials.iter().filter(|o| f(o)).count();
    let monge_count = count(|o| o.monge);
    let unique_count = count(|o| o.unique);
    let twist_count = count(|o| o.twist);
    let k = trials.len();
    let mut violations: Vec<String> = trials.iter().filter_map(|o| o.violation.clone()).collect();
    violations.sort();
    Ok(ExperimentReport {
        graph: cfg.graph.clone(),
        profile: cfg.profile.clone(),
        trials: k,
        n: cfg.n,
        d: cfg.d,
        seed: cfg.seed,
        mode: cfg.mode,
        density: cfg.density,
        probes: cfg.probes,
        prediction,
        rule: outcome.rule,
        monge_count,
        unique_count,
        twist_count,
        monge_rate: rate(monge_count, k),
        unique_rate: rate(unique_count, k),
        twist_rate: rate(twist_count, k),
        mean_solve_ms: (k > 0).then(|| trials.iter().map(|o| o.solve_ms).sum::<f64>() / k as f64),
        mean_pivots: (k > 0).then(|| trials.iter().map(|o| o.pivots as f64).sum::<f64>() / k as f64),
        violations,
    })
}
