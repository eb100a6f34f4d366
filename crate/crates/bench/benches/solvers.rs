use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qar_core::dynamics::Thermalization;
use qar_core::fcs::{cgf_cumulants, solve};
use qar_core::{Model, Role};

fn rate_matrix(c: &mut Criterion) {
    let mut g = c.benchmark_group("rate_matrix");
    for n in [11u32, 31, 51] {
        let m = Model::standard(n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| black_box(m.rate_matrix().unwrap()))
        });
    }
    g.finish();
}

fn steady_and_noise(c: &mut Criterion) {
    let mut g = c.benchmark_group("steady_and_noise");
    for n in [11u32, 31, 51] {
        let r = Model::standard(n).unwrap().rate_matrix().unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &r, |b, r| {
            b.iter(|| black_box(solve(r, Role::Cold).unwrap()))
        });
    }
    g.finish();
}

fn eigenvalue_oracle(c: &mut Criterion) {
    let r = Model::standard(31).unwrap().rate_matrix().unwrap();
    c.bench_function("cgf_cumulants/31", |b| {
        b.iter(|| black_box(cgf_cumulants(&r, Role::Cold, 1e-4).unwrap()))
    });
}

fn thermalization_time(c: &mut Criterion) {
    let t = Thermalization::new(31, 1.0, 100.0, 1.0, 4.0).unwrap();
    c.bench_function("thermalization_time/31", |b| {
        b.iter(|| black_box(t.time(1e-6, &Default::default()).unwrap()))
    });
}

criterion_group!(benches, rate_matrix, steady_and_noise, eigenvalue_oracle, thermalization_time);
criterion_main!(benches);
