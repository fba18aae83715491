use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use tripartite_core::engine::{
    run_qkd, run_secret_sharing, Backend, EveStrategy, Party, QkdConfig, SecretSharingConfig,
};
use tripartite_core::optics::OpticalSetup;
use tripartite_core::par::Execution;

const TRIALS: u64 = 5_000;
const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn secret_sharing(c: &mut Criterion) {
    let mut group = c.benchmark_group("secret_sharing");
    group.sample_size(10);
    let optical = Backend::optical(&OpticalSetup::default()).unwrap();
    for (backend_name, backend) in [("abstract", Backend::Abstract), ("optical", optical)] {
        for (mode, execution) in MODES {
            let cfg = SecretSharingConfig {
                trials: TRIALS,
                seed: 1,
                backend: backend.clone(),
                execution,
                ..Default::default()
            };
            group.bench_with_input(BenchmarkId::new(backend_name, mode), &cfg, |b, cfg| {
                b.iter(|| black_box(run_secret_sharing(cfg).unwrap()))
            });
        }
    }
    group.finish();
}

fn qkd(c: &mut Criterion) {
    let mut group = c.benchmark_group("qkd");
    group.sample_size(10);
    for (name, eve) in [("honest", None), ("intercept", Some(EveStrategy::subspace(Party::Bob)))] {
        for (mode, execution) in MODES {
            let cfg = QkdConfig {
                trials: TRIALS,
                seed: 1,
                eve: eve.clone(),
                execution,
                ..Default::default()
            };
            group.bench_with_input(BenchmarkId::new(name, mode), &cfg, |b, cfg| {
                b.iter(|| black_box(run_qkd(cfg).unwrap()))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, secret_sharing, qkd);
criterion_main!(benches);
