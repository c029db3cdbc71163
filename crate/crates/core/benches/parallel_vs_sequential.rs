use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mmot_core::classify::RegularityProfile;
use mmot_core::exec::Exec;
use mmot_core::graph::{cocktail_party, star};
use mmot_core::marginal::{discretize, Density, DiscreteMarginal};
use mmot_core::model::CostModel;
use mmot_core::solve::solve_kp_with;
use mmot_core::verify::{run_experiment, ExperimentConfig};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn cocktail_party_model() -> CostModel<f64> {
    let marginals: Vec<DiscreteMarginal<f64>> = (0..8).map(|i| discretize(Density::Uniform, 4, 2, 7 + i)).collect();
    CostModel::new(cocktail_party(8), marginals).expect("valid model")
}

fn solve(c: &mut Criterion) {
    let cm = cocktail_party_model();
    let mut group = c.benchmark_group("solve_cocktail_party_8");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| solve_kp_with(&cm, exec).expect("solves"))
        });
    }
    group.finish();
}

fn experiment(c: &mut Criterion) {
    let g = star(6, 1);
    let profile = RegularityProfile::ac(6, [1]).expect("valid profile");
    let mut group = c.benchmark_group("experiment_star_6");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        let mut cfg = ExperimentConfig::new(g.clone(), profile.clone(), 16, 3, 2, 11);
        cfg.exec = exec;
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| run_experiment(cfg).expect("runs"))
        });
    }
    group.finish();
}

criterion_group!(benches, solve, experiment);
criterion_main!(benches);
