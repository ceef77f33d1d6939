use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use metriplectic::dynamics::{integrate, rhs_bracket, rhs_euler_lagrange, Engine, Method};
use metriplectic::verify::{run_suite, Suite};
use metriplectic_bench::fixtures;

fn vector_fields(c: &mut Criterion) {
    let mut group = c.benchmark_group("rhs");
    for (name, sys, x) in fixtures() {
        group.bench_with_input(BenchmarkId::new("bracket", name), &x, |b, x| {
            b.iter(|| rhs_bracket(&sys, black_box(x)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("euler_lagrange", name), &x, |b, x| {
            b.iter(|| rhs_euler_lagrange(&sys, black_box(x)).unwrap())
        });
    }
    group.finish();
}

fn trajectories(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate_100_steps");
    group.sample_size(20);
    for (name, sys, x) in fixtures() {
        for (label, engine) in [
            ("bracket", Engine::BRACKET),
            ("euler_lagrange", Engine::EULER_LAGRANGE),
        ] {
            group.bench_function(BenchmarkId::new(label, name), |b| {
                b.iter(|| integrate(&sys, engine, &x, 1e-4, 1e-2, Method::Rk4).unwrap())
            });
        }
    }
    group.finish();
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("symmetry_suite_10_cases");
    group.sample_size(10);
    for (name, sys, _) in fixtures() {
        group.bench_function(name, |b| {
            b.iter(|| run_suite(Suite::Symmetry, &sys, 42, 10).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, vector_fields, trajectories, suites);
criterion_main!(benches);
