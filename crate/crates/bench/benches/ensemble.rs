use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use threshnet::disparity::{sample_filtered_graph, DisparityParams};
use threshnet::ensemble::sample_graph_with;
use threshnet::{ModelParams, SamplerKind};

fn samplers(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_graph");
    group.sample_size(20);
    for &n in &[1_000usize, 4_000] {
        let params = ModelParams::with_mean_degree(n, 5.0, 0.3).unwrap();
        for (name, kind) in [("naive", SamplerKind::Naive), ("skip", SamplerKind::Skip)] {
            group.bench_with_input(BenchmarkId::new(name, n), &params, |b, p| {
                let mut seed = 0;
                b.iter(|| {
                    seed += 1;
                    black_box(sample_graph_with(p, seed, kind))
                })
            });
        }
    }
    let params = ModelParams::with_mean_degree(100_000, 5.0, 0.3).unwrap();
    group.bench_function("skip/100000", |b| {
        b.iter(|| black_box(sample_graph_with(&params, 7, SamplerKind::Skip)))
    });
    group.finish();
}

fn disparity(c: &mut Criterion) {
    let params = DisparityParams::new(1_000, 0.3, 1e-3).unwrap();
    c.bench_function("disparity_filtered_graph/1000", |b| {
        b.iter(|| black_box(sample_filtered_graph(&params, 3).unwrap()))
    });
}

criterion_group!(benches, samplers, disparity);
criterion_main!(benches);
