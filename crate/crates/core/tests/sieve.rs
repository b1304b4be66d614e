use std::sync::Arc;

use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use workbench_core::primes::{gcd, is_prime_trial};
use workbench_core::sieve::{default_shape, goldbach_window_scan, GoldbachWindow, MomentRange};
use workbench_core::{PrimeTable, SieveConfig, SieveEngine, Tuple};

fn divisors(v: u64) -> Vec<u64> {
    (1..=v).filter(|d| v % d == 0).collect()
}

/// Sum of `λ_d` over every divisor tuple, with no pruning.
fn naive_weight(e: &SieveEngine, n: u64) -> f64 {
    let h = e.config().tuple.offsets().to_vec();
    let lists: Vec<Vec<u64>> = h.iter().map(|&s| divisors((n as i64 + s) as u64)).collect();
    let mut total = 0.0;
    let mut idx = vec![0usize; lists.len()];
    loop {
        let d: Vec<u64> = idx.iter().zip(&lists).map(|(&i, l)| l[i]).collect();
        total += e.lambda_coeff(&d);
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return total;
            }
            idx[pos] += 1;
            if idx[pos] < lists[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[test]
fn weights_match_naive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let tuples: [&[i64]; 6] = [&[0], &[4], &[0, 2], &[0, 6], &[0, 2, 6], &[0, 4, 6]];
    for _ in 0..6 {
        let h = tuples[rng.random_range(0..tuples.len())];
        let w_bound = [2.0, 3.0, 5.0][rng.random_range(0..3)];
        let delta = rng.random_range(0.3..0.42);
        let tuple = Tuple::new(h.to_vec()).unwrap();
        let cfg = SieveConfig::with_parts(1_000_000, delta, tuple.clone(), default_shape(tuple.k()), w_bound, None).unwrap();
        let e = SieveEngine::new(cfg).unwrap();
        for _ in 0..300 {
            let n = rng.random_range(1..5000u64);
            let fast = e.weight(n).unwrap();
            let slow = naive_weight(&e, n);
            assert!((fast - slow).abs() <= 1e-12 * (1.0 + slow.abs()), "n = {n}, {h:?}: {fast} vs {slow}");
        }
    }
}

#[test]
fn coefficients_use_the_profile() {
    let cfg = SieveConfig::with_parts(1_000_000, 0.4, Tuple::new(vec![0, 2]).unwrap(), default_shape(2), 2.0, None).unwrap();
    let e = SieveEngine::new(cfg).unwrap();
    let log_r = (e.config().r as f64).ln();
    for d in [[3u64, 1], [3, 5], [15, 1], [7, 11]] {
        let t: Vec<f64> = d.iter().map(|&x| (x as f64).ln() / log_r).collect();
        let mu: i32 = d.iter().map(|&x| workbench_core::primes::mobius(x)).product();
        assert!((e.lambda_coeff(&d) - f64::from(mu) * e.f_value(&t)).abs() < 1e-15);
    }
}

#[test]
fn moment_sums_are_additive() {
    let cfg = SieveConfig::new(200_000, 0.3, Tuple::new(vec![0, 2, 6]).unwrap()).unwrap();
    let e = SieveEngine::new(cfg).unwrap();
    let whole = e.moment_sums(MomentRange::Custom { lo: 1, hi: 150_000 }, 2).unwrap();
    let a = e.moment_sums(MomentRange::Custom { lo: 1, hi: 70_001 }, 2).unwrap();
    let b = e.moment_sums(MomentRange::Custom { lo: 70_002, hi: 150_000 }, 2).unwrap();
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(1.0);
    assert_eq!(whole.n_count, a.n_count + b.n_count);
    assert!(close(whole.sum_w2, a.sum_w2 + b.sum_w2));
    for i in 0..3 {
        assert!(close(whole.sum_prime_w2[i], a.sum_prime_w2[i] + b.sum_prime_w2[i]));
        for j in 0..3 {
            assert!(close(whole.sum_pair_w2[i][j], a.sum_pair_w2[i][j] + b.sum_pair_w2[i][j]));
        }
    }
    assert!(close(whole.s_value, a.s_value + b.s_value));
}

#[test]
fn moment_sums_match_a_direct_loop() {
    let cfg = SieveConfig::new(100_000, 0.3, Tuple::new(vec![0, 2]).unwrap()).unwrap();
    let e = SieveEngine::new(cfg).unwrap();
    let rep = e.moment_sums(MomentRange::Half, 1).unwrap();
    let (w, b0) = (e.config().w, e.config().b0);
    let (mut s, mut p0, mut p01) = (0.0, 0.0, 0.0);
    for n in (50_000..=100_000).filter(|n| n % w == b0 % w) {
        let w2 = e.weight(n).unwrap().powi(2);
        s += w2;
        if is_prime_trial(n) {
            p0 += w2;
            if is_prime_trial(n + 2) {
                p01 += w2;
            }
        }
    }
    assert!((rep.sum_w2 - s).abs() < 1e-9 * s);
    assert!((rep.sum_prime_w2[0] - p0).abs() < 1e-9 * s);
    assert!((rep.sum_pair_w2[0][1] - p01).abs() < 1e-9 * s);
    assert!(rep.sum_w2 > 0.0);
    assert!(rep.sum_prime_w2.iter().all(|&x| x >= 0.0));
}

#[test]
fn nondegenerate_for_admissible_tuples() {
    for h in [vec![0], vec![0, 2], vec![0, 4, 6], vec![0, 2, 6, 8]] {
        let cfg = SieveConfig::new(100_000, 0.25, Tuple::new(h).unwrap()).unwrap();
        let e = SieveEngine::new(cfg).unwrap();
        assert!(e.moment_sums(MomentRange::Full, 1).unwrap().sum_w2 > 0.0);
    }
}

#[test]
fn tao_check_has_no_violations() {
    let cfg = SieveConfig::new(200_000, 0.35, Tuple::new(vec![0, 2, 6]).unwrap()).unwrap();
    let e = SieveEngine::new(cfg.clone()).unwrap();
    let alt = workbench_core::GShape { t: cfg.shape.t * 0.5, ..cfg.shape };
    let rep = e.tao_domination_check(0, 2, alt, MomentRange::Full).unwrap();
    assert!(rep.checked > 100);
    assert_eq!(rep.violations, 0);
    assert_eq!(rep.max_deviation, 0.0);
    assert!(rep.differing_elsewhere > 0);
    assert!(e.tao_domination_check(1, 1, alt, MomentRange::Full).is_err());
}

#[test]
fn window_scans_satisfy_cauchy_schwarz() {
    let cfg = SieveConfig::new(1_000_000, 0.25, Tuple::new(vec![0, 2, 6]).unwrap()).unwrap();
    let primes = Arc::new(PrimeTable::up_to(1_000_100, true).unwrap());
    let scanner = GoldbachWindow::new(cfg, primes).unwrap();
    for big_n in [200u64, 1000, 4096, 50_000, 999_998] {
        let rep = scanner.scan(big_n).unwrap();
        assert!(rep.cs_holds, "{rep:?}");
        assert!(rep.pairs_cross >= 0.0 && rep.pairs_same >= 0.0);
        let w = rep.witness.unwrap();
        assert!(is_prime_trial(w.p) && is_prime_trial(w.q));
        assert!(w.n >= big_n.div_ceil(2));
    }
}

#[test]
fn window_needs_a_valid_mirror() {
    let cfg = SieveConfig::new(1_000_000, 0.25, Tuple::new(vec![0, 2]).unwrap()).unwrap();
    assert!(goldbach_window_scan(&cfg, 2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weight_is_periodic_in_support(n in 1u64..40_000) {
        // Each weight only sees divisors up to R coprime to W, so two n with
        // the same residues modulo every such prime agree.
        let cfg = SieveConfig::new(1_000_000, 0.2, Tuple::new(vec![0, 2]).unwrap()).unwrap();
        let e = SieveEngine::new(cfg).unwrap();
        let r = e.config().r;
        let period: u64 = (2..=r).filter(|&p| is_prime_trial(p) && gcd(p, e.config().w) == 1).product();
        prop_assume!(n + period + 2 < 1_000_000);
        let a = e.weight(n).unwrap();
        let b = e.weight(n + period).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }
}
