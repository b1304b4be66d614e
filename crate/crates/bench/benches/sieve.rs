use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use workbench_core::sieve::MomentRange;
use workbench_core::{SieveConfig, SieveEngine, Tuple};

fn engine(n: u64) -> SieveEngine {
    let cfg = SieveConfig::new(n, 0.25, Tuple::new(vec![0, 2, 6]).unwrap()).unwrap();
    SieveEngine::new(cfg).unwrap()
}

fn weights(c: &mut Criterion) {
    let cfg = SieveConfig::new(10_000_000, 0.25, Tuple::new(vec![0, 2, 6]).unwrap()).unwrap();
    c.bench_function("engine build N=1e7", |b| b.iter(|| SieveEngine::new(black_box(cfg.clone())).unwrap()));
    let e = engine(10_000_000);
    c.bench_function("weight x1000", |b| {
        b.iter(|| (1..=1000u64).map(|n| e.weight(black_box(n)).unwrap()).sum::<f64>())
    });
    let e = engine(1_000_000);
    c.bench_function("moment_sums N=1e6 half", |b| b.iter(|| e.moment_sums(MomentRange::Half, 1).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = weights
}
criterion_main!(benches);
