use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use infmax_bench::{bench_graph, bench_pool, BENCH_SEED};
use infmax_core::rng::{domain, SeedStream};
use infmax_core::{
    adapt_greedy, epic, max_cover, sample_realization, sample_rr_set, PolicyConfig, RrCollection,
    SelectionMode,
};

fn rr_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("rr_sampling");
    for n in [1_000usize, 10_000] {
        let g = bench_graph(n);
        let stream = SeedStream::new(BENCH_SEED, domain::RR_SELECTION);
        group.bench_with_input(BenchmarkId::new("single_set", n), &g, |b, g| {
            let mut i = 0u64;
            b.iter(|| {
                i += 1;
                black_box(sample_rr_set(g, stream.seed_at(i)).unwrap())
            });
        });
        group.bench_with_input(BenchmarkId::new("extend_4096", n), &g, |b, g| {
            b.iter(|| {
                let mut pool = RrCollection::new(g);
                pool.extend_with(g, 4096, &stream).unwrap();
                black_box(pool.total())
            });
        });
    }
    group.finish();
}

fn greedy_cover(c: &mut Criterion) {
    let mut group = c.benchmark_group("max_cover");
    let g = bench_graph(10_000);
    for pool_size in [10_000usize, 50_000] {
        let pool = bench_pool(&g, pool_size);
        group.bench_with_input(BenchmarkId::new("b50", pool_size), &pool, |b, pool| {
            b.iter(|| black_box(max_cover(pool, 50).unwrap().covered));
        });
    }
    group.finish();
}

fn selectors(c: &mut Criterion) {
    let mut group = c.benchmark_group("selectors");
    group.sample_size(10);
    let g = bench_graph(10_000);
    group.bench_function("epic_b10", |b| {
        let mut i = 0u64;
        b.iter(|| {
            i += 1;
            black_box(
                epic::select(&g, 10, 0.5, BENCH_SEED ^ i)
                    .unwrap()
                    .1
                    .rr_samples,
            )
        });
    });
    group.bench_function("fixed_b10_pool10k", |b| {
        let mut i = 0u64;
        b.iter(|| {
            i += 1;
            black_box(
                epic::fixed_select(&g, 10, 10_000, BENCH_SEED ^ i)
                    .unwrap()
                    .1
                    .rr_samples,
            )
        });
    });
    group.finish();
}

fn adaptive_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("adapt_greedy");
    group.sample_size(10);
    let g = bench_graph(1_000);
    let phi = sample_realization(&g, BENCH_SEED);
    group.bench_function("k16_r4_expected", |b| {
        let cfg = PolicyConfig::uniform(16, 4, 0.5, SelectionMode::Expected, BENCH_SEED);
        b.iter(|| black_box(adapt_greedy(&g, &phi, &cfg).unwrap().total_activated));
    });
    group.finish();
}

criterion_group!(benches, rr_sampling, greedy_cover, selectors, adaptive_run);
criterion_main!(benches);
