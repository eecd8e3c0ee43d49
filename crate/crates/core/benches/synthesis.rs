//! Sequential (one-thread pool) against data-parallel (default pool) runs of
//! the heavier pipeline stages.

use actionwave::metrics::trend_report;
use actionwave::model::{Harmonic, ModelKind};
use actionwave::pipeline::{build_family, default_grid};
use actionwave::synth::synthesize;
use actionwave::Grid;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        ("sequential", rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("parallel", rayon::ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn bench(c: &mut Criterion) {
    let coords = Grid::new(-9.0, 9.0, 4001).unwrap().nodes();
    let morse_grid = default_grid(ModelKind::Morse, Some(12.0), 6).unwrap().nodes();
    let mut group = c.benchmark_group("synthesis");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(BenchmarkId::new("harmonic_n12", label), |b| {
            b.iter(|| pool.install(|| synthesize(&Harmonic, black_box(12), &coords).unwrap()))
        });
        group.bench_function(BenchmarkId::new("morse_family", label), |b| {
            b.iter(|| pool.install(|| build_family(ModelKind::Morse, Some(12.0), 6, black_box(&morse_grid)).unwrap()))
        });
        group.bench_function(BenchmarkId::new("pt_trend", label), |b| {
            b.iter(|| pool.install(|| trend_report(ModelKind::PoschlTeller, black_box(&[5.0, 10.0, 20.0, 40.0]), 4).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
