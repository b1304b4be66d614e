use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use workbench_core::variational::{constrained_minimizer_ratio, g_closed_forms, moment_ratios, simplex_mc_integrals, PsiChoice};
use workbench_core::GParams;

fn profiles(c: &mut Criterion) {
    let big = GParams::schedule(1_000_000, PsiChoice::LogLog, 1.0).unwrap();
    c.bench_function("closed forms", |b| b.iter(|| g_closed_forms(black_box(&big))));
    c.bench_function("moment_ratios k=1e6", |b| b.iter(|| moment_ratios(black_box(&big)).unwrap()));
    c.bench_function("minimizer k=1e6", |b| b.iter(|| constrained_minimizer_ratio(black_box(&big)).unwrap()));
    let small = GParams::new(6, 1.5, 3.0, 0.6).unwrap();
    c.bench_function("monte carlo k=6 1e5", |b| b.iter(|| simplex_mc_integrals(&small, 100_000, black_box(1)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = profiles
}
criterion_main!(benches);
