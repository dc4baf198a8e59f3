use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tulczyjew::check::{run_suite, Execution};
use tulczyjew::sim::{compare_reduction, SimConfig};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn property_suite(c: &mut Criterion) {
    let mut g = c.benchmark_group("check");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, 200), &exec, |b, &exec| {
            b.iter(|| run_suite(black_box(1), 200, None, exec).unwrap())
        });
    }
    g.finish();
}

fn reduction_comparison(c: &mut Criterion) {
    let mut cfg = SimConfig::precession();
    cfg.steps = 2000;
    let mut g = c.benchmark_group("compare_reduction");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, cfg.steps), &exec, |b, &exec| {
            b.iter(|| compare_reduction(black_box(&cfg), exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, property_suite, reduction_comparison);
criterion_main!(benches);
