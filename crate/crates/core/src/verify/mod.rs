//! Empirical checks on solved instances: Monge-ness, uniqueness, counterexamples and batches.

mod counter;
mod experiment;
mod monge;
mod unique;

pub use counter::{gen_counterexample_prop21, CounterKind, Counterexample};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentReport};
pub use monge::{check_monge, pushforward_holds, MongeVerdict, Split, MONGE_TOL};
pub use unique::{probe_uniqueness, probe_uniqueness_with, UniquenessVerdict, FEAS_TOL, GAP_TOL, PROBES};
