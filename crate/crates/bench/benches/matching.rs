use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fairdiv::matching::{max_matching, perfect_r_matching, random_bipartite};

fn hopcroft_karp(c: &mut Criterion) {
    let mut group = c.benchmark_group("max_matching");
    for n in [100usize, 1_000, 5_000] {
        let p = 3.0 * (n as f64).ln() / n as f64;
        let g = random_bipartite(n, n, &vec![p; n], 7).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| max_matching(black_box(g)))
        });
    }
    group.finish();
}

fn r_matching(c: &mut Criterion) {
    let mut group = c.benchmark_group("perfect_r_matching");
    for (n, r) in [(100usize, 5usize), (200, 10)] {
        let nr = n * r;
        let p = 3.0 * (n as f64).ln() / n as f64;
        let g = random_bipartite(n, nr, &vec![p; nr], 11).unwrap();
        group.bench_with_input(BenchmarkId::new(format!("r{r}"), n), &g, |b, g| {
            b.iter(|| perfect_r_matching(black_box(g), r))
        });
    }
    group.finish();
}

criterion_group!(benches, hopcroft_karp, r_matching);
criterion_main!(benches);
