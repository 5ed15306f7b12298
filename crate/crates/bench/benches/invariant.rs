use std::hint::black_box;

use circinv_bench::{rippled_circle, smooth_field};
use circinv_core::{
    assemble_operator, frechet_derivative, invariant_analytic, invariant_oracle, make_circle, Basis, Curve,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn analytic_profile(c: &mut Criterion) {
    let mut group = c.benchmark_group("invariant_analytic");
    for (n, m) in [(16, 128), (32, 256), (32, 512)] {
        let curve = rippled_circle(n, m);
        group.bench_with_input(BenchmarkId::from_parameter(m), &curve, |b, curve| {
            b.iter(|| invariant_analytic(black_box(curve), 1.0).unwrap())
        });
    }
    group.finish();
}

fn oracle_point(c: &mut Criterion) {
    let curve = rippled_circle(32, 512);
    c.bench_function("invariant_oracle/single_phi", |b| {
        b.iter(|| invariant_oracle(black_box(&curve), 1.0, 0.3).unwrap())
    });
}

fn normalization(c: &mut Criterion) {
    let raw = Curve::from_fn(512, 32, |t| {
        let s = t + 0.2 * t.sin();
        circinv_core::Vec2::new(1.1 * s.cos(), s.sin())
    })
    .unwrap();
    c.bench_function("normalize/512", |b| b.iter(|| black_box(&raw).normalize().unwrap()));
}

fn derivative(c: &mut Criterion) {
    let curve = rippled_circle(32, 512);
    let sigma = smooth_field(512);
    c.bench_function("frechet_derivative/512", |b| {
        b.iter(|| frechet_derivative(black_box(&curve), 1.0, &sigma).unwrap())
    });
    let circle = make_circle(1.0, 16, 256).unwrap();
    c.bench_function("assemble_operator/16_modes", |b| {
        b.iter(|| assemble_operator(black_box(&circle), 1.0, Basis::Normal { modes: 16 }).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = analytic_profile, oracle_point, normalization, derivative
}
criterion_main!(benches);
