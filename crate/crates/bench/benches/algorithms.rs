use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tci_bench::{cube, mixed_family, pseudo_random_matrix, scaled_simplex, tower_matrix};
use tci_core::{component_count, mixed_volume, search_irreducibility_certificate, smith_normal_form, SearchOptions};

fn snf(c: &mut Criterion) {
    let mut group = c.benchmark_group("smith_normal_form");
    for n in [3usize, 6, 10] {
        let a = pseudo_random_matrix(n, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| smith_normal_form(black_box(a))));
    }
    group.finish();
}

fn mvol(c: &mut Criterion) {
    let mut group = c.benchmark_group("mixed_volume");
    for n in [2usize, 3, 4] {
        let sets: Vec<_> = (0..n)
            .map(|i| if i % 2 == 0 { scaled_simplex(n, i as i64 + 1) } else { cube(n, 2) })
            .collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &sets, |b, s| b.iter(|| mixed_volume(black_box(s)).unwrap()));
    }
    group.finish();
}

fn components(c: &mut Criterion) {
    let mut group = c.benchmark_group("component_count");
    for m in [4usize, 8, 12] {
        let family = mixed_family(4, m);
        group.bench_with_input(BenchmarkId::from_parameter(m), &family, |b, f| b.iter(|| component_count(black_box(f)).unwrap()));
    }
    group.finish();
}

fn eci(c: &mut Criterion) {
    let mut group = c.benchmark_group("eci_search");
    group.sample_size(10);
    for r in [0usize, 1, 2] {
        let m = tower_matrix(r);
        let opts = SearchOptions::default();
        group.bench_with_input(BenchmarkId::from_parameter(r), &m, |b, m| {
            b.iter(|| search_irreducibility_certificate(std::slice::from_ref(black_box(m)), &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, snf, mvol, components, eci);
criterion_main!(benches);
