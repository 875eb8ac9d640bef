use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use signlab_core::walk::{build_graph_walk, build_lumped_walk, spectral_gap, Graph};

fn lumped_gap(c: &mut Criterion) {
    let mut group = c.benchmark_group("lumped walk gap");
    group.sample_size(10);
    for n in [3, 4, 5] {
        let chain = build_lumped_walk(n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &chain, |b, chain| {
            b.iter(|| spectral_gap(black_box(chain), 1e-10).unwrap())
        });
    }
    group.finish();
}

fn cycle_gap(c: &mut Criterion) {
    let mut group = c.benchmark_group("cycle gap");
    for m in [16, 64] {
        let chain = build_graph_walk(&Graph::cycle(m).unwrap()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &chain, |b, chain| {
            b.iter(|| spectral_gap(black_box(chain), 1e-10).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, lumped_gap, cycle_gap);
criterion_main!(benches);
