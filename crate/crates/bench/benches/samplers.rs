use aqoci_bench::{centroid_qubo, random_qubo};
use aqoci_core::samplers::{simulated_annealing, tabu_search};
use aqoci_core::{AnnealConfig, TabuConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn samplers(c: &mut Criterion) {
    let mut group = c.benchmark_group("samplers");
    group.sample_size(10);
    for n in [12, 48, 128] {
        let q = random_qubo(n, 1);
        group.bench_with_input(BenchmarkId::new("anneal", n), &q, |b, q| {
            b.iter(|| simulated_annealing(q, &AnnealConfig::default()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("tabu", n), &q, |b, q| {
            b.iter(|| tabu_search(q, &TabuConfig::default()).unwrap())
        });
    }
    let q = centroid_qubo(20, 3, 4);
    group.bench_function(BenchmarkId::new("tabu_centroid", q.num_vars()), |b| {
        b.iter(|| tabu_search(&q, &TabuConfig::default()).unwrap())
    });
    group.finish();
}

fn brute_force(c: &mut Criterion) {
    let q = random_qubo(16, 2);
    c.bench_function("brute_force_16", |b| {
        b.iter(|| q.brute_force_minimum().unwrap())
    });
}

criterion_group!(benches, samplers, brute_force);
criterion_main!(benches);
