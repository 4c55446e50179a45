use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use treelen::lengthseq::exact_distribution;
use treelen::reconstruct::{
    caterpillar_statistics, reconstruct_caterpillar, reconstruct_general_position,
    reconstruct_ultrametric, solve_caterpillar, DEFAULT_CATERPILLAR_SEARCH_CAP,
};
use treelen::tree::canonical_code;
use treelen_bench::{general_position, spine, ultrametric};

fn forward(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_distribution");
    group.sample_size(10);
    for n in [6, 8, 10] {
        let t = general_position(n);
        group.bench_with_input(BenchmarkId::new("general_position", n), &t, |b, t| {
            b.iter(|| exact_distribution(black_box(t)).unwrap())
        });
        let u = ultrametric(n);
        group.bench_with_input(BenchmarkId::new("ultrametric", n), &u, |b, t| {
            b.iter(|| exact_distribution(black_box(t)).unwrap())
        });
    }
    group.finish();
}

fn inverse(c: &mut Criterion) {
    let mut group = c.benchmark_group("reconstruct");
    group.sample_size(10);
    let gp = exact_distribution(&general_position(8)).unwrap();
    group.bench_function("general_position_8", |b| {
        b.iter(|| reconstruct_general_position(black_box(&gp)).unwrap())
    });
    let um = exact_distribution(&ultrametric(10)).unwrap().min_lex();
    group.bench_function("ultrametric_10", |b| {
        b.iter(|| reconstruct_ultrametric(black_box(&um)).unwrap())
    });
    let cat = exact_distribution(&spine(&[2, 1, 0, 3, 2])).unwrap();
    group.bench_function("caterpillar_8", |b| {
        b.iter(|| reconstruct_caterpillar(black_box(&cat)).unwrap())
    });
    let stats = caterpillar_statistics(&[2, 11, 12]).unwrap();
    group.bench_function("caterpillar_statistics_25", |b| {
        b.iter(|| solve_caterpillar(black_box(&stats), DEFAULT_CATERPILLAR_SEARCH_CAP).unwrap())
    });
    group.finish();
}

fn canonical(c: &mut Criterion) {
    let t = ultrametric(200);
    c.bench_function("canonical_code_200", |b| b.iter(|| canonical_code(black_box(&t))));
}

criterion_group!(benches, forward, inverse, canonical);
criterion_main!(benches);
