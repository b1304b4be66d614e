use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use workbench_core::primes::{gap_counts, goldbach_gaps, GapMode};
use workbench_core::PrimeTable;

fn sieving(c: &mut Criterion) {
    c.bench_function("prime_table 1e7", |b| b.iter(|| PrimeTable::up_to(black_box(10_000_000), false).unwrap()));
    c.bench_function("prime_table 1e6 with spf", |b| b.iter(|| PrimeTable::up_to(black_box(1_000_000), true).unwrap()));
    c.bench_function("gap_counts 1e6 / 1e3", |b| {
        b.iter(|| gap_counts(black_box(1_000_000), 1000, GapMode::AllPairs).unwrap())
    });
    c.bench_function("goldbach_gaps 1e6", |b| b.iter(|| goldbach_gaps(black_box(1_000_000)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = sieving
}
criterion_main!(benches);
