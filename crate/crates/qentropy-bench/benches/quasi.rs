//! Criterion benchmarks for the hot paths: quasi-entropy evaluation and
//! gradients per group, the covariance oracle, the reduced tetrahedral
//! energy and a full rod minimization.

use criterion::{criterion_group, criterion_main, Criterion};
use qentropy::cov::build_cov_w2_sym;
use qentropy::models::{ModelCoefficients, RodModel};
use qentropy::optimize::{minimize_multistart, MinimizeOptions};
use qentropy::quasi::{
    q4_reduced_st, quasi_entropy, quasi_entropy_gradient, Group, OrderParameterSet,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn bench_quasi_entropy(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut group = c.benchmark_group("quasi_entropy");
    for g in [Group::Dinf, Group::C2, Group::T, Group::D3] {
        let radius = match g {
            Group::O | Group::T | Group::D4 | Group::D3 => 0.08,
            _ => 0.2,
        };
        let p = OrderParameterSet::random_in_domain(g, radius, &mut rng);
        group.bench_function(g.name(), |b| {
            b.iter(|| quasi_entropy(black_box(&p)).unwrap())
        });
    }
    group.finish();
}

fn bench_gradient(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut group = c.benchmark_group("gradient");
    for g in [Group::Dinf, Group::D2, Group::T] {
        let radius = if g == Group::T { 0.08 } else { 0.2 };
        let p = OrderParameterSet::random_in_domain(g, radius, &mut rng);
        group.bench_function(g.name(), |b| {
            b.iter(|| quasi_entropy_gradient(black_box(&p)).unwrap())
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = OrderParameterSet::random_in_domain(Group::D3, 0.08, &mut rng);
    c.bench_function("cov_oracle_d3", |b| {
        b.iter(|| {
            build_cov_w2_sym(Group::D3, black_box(&p))
                .unwrap()
                .neg_logdet_sum()
                .unwrap()
        })
    });
}

fn bench_reduced(c: &mut Criterion) {
    c.bench_function("q4_reduced_st", |b| {
        b.iter(|| q4_reduced_st(black_box(0.1), black_box(0.05)))
    });
}

fn bench_rod_minimization(c: &mut Criterion) {
    let model = RodModel {
        coeffs: ModelCoefficients {
            nu: 5.0 / 9.0,
            eta: 14.0 * 5.0 / 9.0,
            ..Default::default()
        },
    };
    let opts = MinimizeOptions {
        n_starts: 4,
        seed: 5,
        ..Default::default()
    };
    c.bench_function("rod_multistart_4", |b| {
        b.iter(|| minimize_multistart(black_box(&model), &opts).unwrap())
    });
}

criterion_group!(
    benches,
    bench_quasi_entropy,
    bench_gradient,
    bench_oracle,
    bench_reduced,
    bench_rod_minimization
);
criterion_main!(benches);
