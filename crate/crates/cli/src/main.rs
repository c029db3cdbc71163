use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mmot_core::bundle::{duals_file, write_file, write_value, ProblemBundle, COUPLING_FILE};
use mmot_core::classify::{classify, ClassificationOutcome, RegularityProfile, Verdict};
use mmot_core::error::MmotError;
use mmot_core::exec::Exec;
use mmot_core::gallery::{run_gallery, GalleryReport};
use mmot_core::graph::{parse_graph, InteractionGraph};
use mmot_core::marginal::Density;
use mmot_core::report::{summarize_solve, ClassifyReport, SolveSummary};
use mmot_core::scalar::{Mode, Rational, Scalar};
use mmot_core::solve::solve_kp_with;
use mmot_core::verify::{run_experiment, ExperimentConfig, ExperimentReport, PROBES};

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_NEGATIVE: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;
const EXIT_RESOURCE: u8 = 4;
const EXIT_VIOLATION: u8 = 5;

/// Monge solutions for graph-structured multi-marginal optimal transport.
///
/// Exit codes: 0 MongeUnique/ok, 1 input error, 2 Negative, 3 Unknown, 4 resource limit,
/// 5 prediction violations or gallery mismatches. `MMOT_VAR_CAP` overrides the LP variable cap.
#[derive(Parser)]
#[command(name = "mmot", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an interaction graph under a regularity profile.
    Classify {
        graph: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        json: bool,
    },
    /// Solve the bundle's transport problem and check the optimal plan.
    Solve {
        bundle: PathBuf,
        #[arg(long, default_value = "rational")]
        mode: Mode,
        #[arg(long, default_value_t = PROBES)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Run seeded trials and compare with the classifier's prediction.
    Experiment {
        graph: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "float")]
        mode: Mode,
        #[arg(long, default_value = "uniform")]
        density: Density,
        #[arg(long, default_value_t = PROBES)]
        probes: usize,
        /// Report path; violating instances go to `violations/` beside it.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Classify every embedded fixture and compare with the expected verdicts.
    Gallery {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct ProfileArgs {
    /// Absolutely continuous marginals, e.g. `1,4`.
    #[arg(long, value_delimiter = ',')]
    ac: Vec<usize>,
    /// Dirac marginals.
    #[arg(long, value_delimiter = ',')]
    dirac: Vec<usize>,
    /// Combined form `ac=1,4;dirac=3`; a bare list means AC indices.
    #[arg(long)]
    profile: Option<String>,
}

fn parse_indices(s: &str) -> Result<Vec<usize>, MmotError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| MmotError::Input(format!("`{t}` is not a vertex index"))))
        .collect()
}

impl ProfileArgs {
    fn build(&self, m: usize) -> Result<RegularityProfile, MmotError> {
        let mut ac = self.ac.clone();
        let mut dirac = self.dirac.clone();
        if let Some(spec) = &self.profile {
            for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
                match part.split_once('=') {
                    Some(("ac", v)) => ac.extend(parse_indices(v)?),
                    Some(("dirac", v)) => dirac.extend(parse_indices(v)?),
                    Some((k, _)) => return Err(MmotError::Input(format!("unknown profile key `{k}`"))),
                    None => ac.extend(parse_indices(part)?),
                }
            }
        }
        RegularityProfile::new(m, ac, dirac)
    }
}

fn error_code(e: &MmotError) -> u8 {
    match e {
        MmotError::Resource { .. } | MmotError::Solver(_) => EXIT_RESOURCE,
        _ => EXIT_INPUT,
    }
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::MongeUnique => EXIT_OK,
        Verdict::Negative => EXIT_NEGATIVE,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

fn read_graph(path: &Path) -> Result<InteractionGraph, MmotError> {
    let text = fs::read_to_string(path).map_err(|e| MmotError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_graph(&text).map_err(|e| match e {
        MmotError::Parse { line, column, message } => MmotError::Parse {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

fn set_text(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(usize::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn classify_text(out: &ClassificationOutcome) -> String {
    let mut s = format!("verdict: {}\n", out.verdict);
    match out.rule {
        Some(r) => writeln!(s, "rule: {r}").unwrap(),
        None => s.push_str("rule: none\n"),
    }
    if out.verdict == Verdict::MongeUnique {
        writeln!(s, "required_ac: {}", set_text(&out.required_ac)).unwrap();
        let matched: Vec<String> = out.matched_rules.iter().map(|r| r.to_string()).collect();
        writeln!(s, "matched_rules: {}", matched.join(", ")).unwrap();
    }
    for d in &out.diagnostics {
        writeln!(s, "diagnostic: {}", d.message).unwrap();
    }
    s
}

fn cmd_classify(graph: &Path, profile: &ProfileArgs, json: bool) -> Result<u8, MmotError> {
    let g = read_graph(graph)?;
    let profile = profile.build(g.m())?;
    let out = classify(&g, &profile)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&ClassifyReport::new(g.m(), g.edge_count(), &out))?);
    } else {
        print!("{}", classify_text(&out));
    }
    Ok(verdict_code(out.verdict))
}

fn solve_in<S: Scalar>(bundle: &Path, probes: usize, seed: u64) -> Result<SolveSummary, MmotError> {
    let b = ProblemBundle::<S>::read(bundle)?;
    let cm = b.model()?;
    let sol = solve_kp_with(&cm, Exec::default())?;
    let summary = summarize_solve(&cm, &sol, probes, seed, Exec::default())?;
    write_file(&bundle.join(COUPLING_FILE), &sol.coupling.to_text())?;
    for i in 0..cm.m() {
        write_file(&bundle.join(duals_file(i + 1)), &sol.duals.marginal_text(i))?;
    }
    write_value(bundle, &sol.value)?;
    Ok(summary)
}

fn solve_text(s: &SolveSummary) -> String {
    let mut t = format!("value: {}\n", s.value);
    writeln!(t, "duality_gap: {}", s.duality_gap).unwrap();
    writeln!(t, "monge: {}", s.monge.is_monge).unwrap();
    if let Some(split) = &s.monge.worst_split {
        writeln!(t, "worst_split: atom {} dominant share {:.6}", split.atom, split.dominant_share).unwrap();
    }
    let unique = if s.uniqueness.unique { "unique-up-to-probes" } else { "non-unique" };
    writeln!(t, "uniqueness: {unique} ({} probes)", s.uniqueness.probes_used).unwrap();
    writeln!(t, "twist_injective: {}", s.twist_injective).unwrap();
    writeln!(t, "pivots: {}", s.stats.pivots).unwrap();
    t
}

fn cmd_solve(bundle: &Path, mode: Mode, probes: usize, seed: u64, json: bool) -> Result<u8, MmotError> {
    let summary = match mode {
        Mode::Rational => solve_in::<Rational>(bundle, probes, seed)?,
        Mode::Float => solve_in::<f64>(bundle, probes, seed)?,
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        print!("{}", solve_text(&summary));
    }
    Ok(EXIT_OK)
}

fn rate_text(r: Option<f64>) -> String {
    r.map_or_else(|| "n/a".into(), |v| format!("{v:.3}"))
}

fn experiment_text(r: &ExperimentReport) -> String {
    let mut t = format!("prediction: {}", r.prediction);
    if let Some(rule) = r.rule {
        write!(t, " ({rule})").unwrap();
    }
    writeln!(t, "\ntrials: {}", r.trials).unwrap();
    writeln!(t, "monge_rate: {}", rate_text(r.monge_rate)).unwrap();
    writeln!(t, "unique_rate: {}", rate_text(r.unique_rate)).unwrap();
    writeln!(t, "twist_rate: {}", rate_text(r.twist_rate)).unwrap();
    writeln!(t, "violations: {}", r.violations.len()).unwrap();
    for v in &r.violations {
        writeln!(t, "  {v}").unwrap();
    }
    t
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    graph: &Path,
    profile: &ProfileArgs,
    trials: usize,
    n: usize,
    d: usize,
    seed: u64,
    mode: Mode,
    density: Density,
    probes: usize,
    out: Option<&Path>,
    json: bool,
) -> Result<u8, MmotError> {
    let g = read_graph(graph)?;
    let profile = profile.build(g.m())?;
    let mut cfg = ExperimentConfig::new(g, profile, trials, n, d, seed);
    cfg.mode = mode;
    cfg.density = density;
    cfg.probes = probes;
    cfg.out_dir = out.map(|p| match p.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => dir.to_path_buf(),
        _ => PathBuf::from("."),
    });
    if let Some(dir) = &cfg.out_dir {
        fs::create_dir_all(dir).map_err(|e| MmotError::Io {
            path: dir.display().to_string(),
            source: e,
        })?;
    }
    let report = run_experiment(&cfg)?;
    let text = serde_json::to_string_pretty(&report)?;
    if let Some(path) = out {
        write_file(path, &(text.clone() + "\n"))?;
    }
    if json {
        println!("{text}");
    } else {
        print!("{}", experiment_text(&report));
    }
    Ok(if report.violations.is_empty() { EXIT_OK } else { EXIT_VIOLATION })
}

fn gallery_text(r: &GalleryReport) -> String {
    let mut t = format!("{:<20} {:<12} {:<16} {:<18} {}\n", "fixture", "verdict", "rule", "required_ac", "ok");
    for row in &r.rows {
        let rule = row.rule.map_or_else(|| "-".to_string(), |r| r.to_string());
        let req = if row.required_ac.is_empty() { "-".to_string() } else { set_text(&row.required_ac) };
        let verdict = row.verdict.to_string();
        writeln!(t, "{:<20} {:<12} {:<16} {:<18} {}", row.name, verdict, rule, req, if row.ok { "yes" } else { "NO" }).unwrap();
    }
    writeln!(t, "mismatches: {}", r.mismatches).unwrap();
    t
}

fn cmd_gallery(json: bool) -> Result<u8, MmotError> {
    let report = run_gallery()?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", gallery_text(&report));
    }
    Ok(if report.mismatches == 0 { EXIT_OK } else { EXIT_VIOLATION })
}

fn run(cli: Cli) -> Result<u8, MmotError> {
    match cli.command {
        Command::Classify { graph, profile, json } => cmd_classify(&graph, &profile, json),
        Command::Solve {
            bundle,
            mode,
            probes,
            seed,
            json,
        } => cmd_solve(&bundle, mode, probes, seed, json),
        Command::Experiment {
            graph,
            profile,
            trials,
            n,
            d,
            seed,
            mode,
            density,
            probes,
            out,
            json,
        } => cmd_experiment(&graph, &profile, trials, n, d, seed, mode, density, probes, out.as_deref(), json),
        Command::Gallery { json } => cmd_gallery(json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
