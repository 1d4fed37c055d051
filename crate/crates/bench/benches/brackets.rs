use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use facecolor::homology::{betti, build_complex, DEFAULT_DIM_BUDGET};
use facecolor::invariants::{pk_bracket_with, PkMethod};
use facecolor::ribbon::j_family;
use facecolor::{color_bracket, tensor_contraction, total_polynomial};
use facecolor_bench::diagram;

fn petersen_blowup(c: &mut Criterion) {
    let d = diagram("petbu");
    let mut g = c.benchmark_group("petbu");
    g.sample_size(10).measurement_time(Duration::from_secs(10));
    g.bench_function("pk_reduced", |b| {
        b.iter(|| pk_bracket_with(&d, PkMethod::Reduced).unwrap())
    });
    g.bench_function("pk_full", |b| {
        b.iter(|| pk_bracket_with(&d, PkMethod::StateSum).unwrap())
    });
    g.bench_function("color", |b| b.iter(|| color_bracket(&d).unwrap()));
    g.finish();
}

fn small(c: &mut Criterion) {
    let j3 = diagram("j3");
    c.bench_function("j3_pk", |b| {
        b.iter(|| pk_bracket_with(&j3, PkMethod::StateSum).unwrap())
    });
    c.bench_function("j3_total", |b| b.iter(|| total_polynomial(&j3).unwrap()));
    c.bench_function("j3_tensor_n4", |b| {
        b.iter(|| tensor_contraction(&j3, 4, u64::MAX).unwrap())
    });
    let j7 = j_family(7).unwrap();
    c.bench_function("j7_pk", |b| b.iter(|| pk_bracket_with(&j7, PkMethod::Reduced).unwrap()));
    let k33 = diagram("k33");
    c.bench_function("k33_betti_n4", |b| {
        b.iter(|| betti(&build_complex(&k33, 4, DEFAULT_DIM_BUDGET).unwrap()).unwrap())
    });
}

criterion_group!(benches, small, petersen_blowup);
criterion_main!(benches);
