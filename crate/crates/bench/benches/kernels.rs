use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dwlab_bench::{ground, near_transition};
use dwlab_core::fock::{full_spectrum, ground_state};
use dwlab_core::observables::{
    chi_finite_difference, correlations, default_delta_lambda, DiscordOptions,
};

fn ground_states(c: &mut Criterion) {
    let mut g = c.benchmark_group("ground_state");
    for n in [800, 9000] {
        let p = near_transition(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| ground_state(black_box(p)).unwrap())
        });
    }
    g.finish();
}

fn chi(c: &mut Criterion) {
    let p = near_transition(800);
    c.bench_function("chi_finite_difference/800", |b| {
        b.iter(|| chi_finite_difference(black_box(&p), default_delta_lambda(800)).unwrap())
    });
}

fn discord(c: &mut Criterion) {
    let gs = ground(800);
    c.bench_function("correlations/800/grid100", |b| {
        b.iter(|| correlations(black_box(&gs), DiscordOptions::default()).unwrap())
    });
}

fn spectrum(c: &mut Criterion) {
    let p = near_transition(200);
    c.bench_function("full_spectrum/200", |b| {
        b.iter(|| full_spectrum(black_box(&p)).unwrap())
    });
}

criterion_group!(benches, ground_states, chi, discord, spectrum);
criterion_main!(benches);
