use quadrature::double_exponential::integrate;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use workbench_core::variational::{
    constrained_minimizer_ratio, fourier_kernel_check, g_closed_forms, g_eval, moment_ratios,
    simplex_mc_integrals, tail_bounds, FourierOptions, PsiChoice,
};
use workbench_core::{GParams, GShape};

/// `∫_0^T h` split at geometric points so that steep profiles are resolved.
fn integrate_split(h: impl Fn(f64) -> f64, l: f64, a: f64, t: f64) -> f64 {
    let mut pts = vec![0.0];
    let mut x = l / a;
    while x < t {
        pts.push(x);
        x *= 2.0;
    }
    pts.push(t);
    pts.windows(2).map(|w| integrate(&h, w[0], w[1], 1e-14).integral).sum()
}

#[test]
fn closed_forms_match_quadrature_on_a_random_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let k = rng.random_range(2..=10u64);
        let l = 1.0 + 9.0 * (1.0 - rng.random::<f64>());
        let a = 100.0 * (1.0 - rng.random::<f64>());
        let t = 10.0 * l / a * k as f64 * (1.0 - rng.random::<f64>());
        let p = GParams::new(k, l, a, t).unwrap();
        let c = g_closed_forms(&p);
        let g = |x: f64| g_eval(&p, x);
        let int_g = integrate_split(g, l, a, t);
        let nu = integrate_split(|x| g(x).powi(2), l, a, t);
        let first = integrate_split(|x| x * g(x).powi(2), l, a, t);
        assert!((c.int_g - int_g).abs() < 1e-10, "{p:?}");
        assert!((c.nu - nu).abs() < 1e-10, "{p:?}");
        assert!((c.m_c - first / nu).abs() < 1e-9, "{p:?}");
        assert!(c.nu > 0.0 && c.m_c > 0.0 && c.m_c < t);
    }
}

#[test]
fn closed_form_examples() {
    let p = GParams::new(2, 2.0, 1.0, 2.0).unwrap();
    assert_eq!(g_eval(&p, 0.0), 0.5);
    assert_eq!(g_eval(&p, 3.0), 0.0);
    assert_eq!(g_eval(&p, 2.0), 0.25);
    let c = g_closed_forms(&p);
    assert!((c.int_g - 2f64.ln()).abs() < 1e-15);
    assert!((c.nu - 0.25).abs() < 1e-15);
    let e = std::f64::consts::E;
    let g = GShape::new(1.0, 1.0, e - 1.0).unwrap();
    assert!((g.m_c() - (1.0 / (1.0 - 1.0 / e) - 1.0)).abs() < 1e-14);
    assert!((g.m_c() - 0.5819767068693265).abs() < 1e-12);
    assert!(GShape::new(2.0, 1.0, 1e-12).unwrap().m_c() < 1e-11);
}

/// Parameters with both tail bounds below 1. From k = 4 on the tail events are
/// frequent enough to be seen in a few hundred thousand samples.
fn tail_case(k: u64) -> GParams {
    let (l, a, t) = match k {
        2 => (1.5, 64.0, 0.52),
        3 => (1.05, 64.0, 0.75),
        4 => (1.7, 32.0, 0.85),
        5 => (2.45, 32.0, 0.675),
        6 => (2.5, 32.0, 0.75),
        7 => (2.25, 32.0, 0.975),
        _ => (2.7, 32.0, 0.825),
    };
    GParams::new(k, l, a, t).unwrap()
}

#[test]
fn tail_estimates_respect_the_bounds() {
    for k in 2..=8 {
        let p = tail_case(k);
        let b = tail_bounds(&p).unwrap();
        assert!(b.relative1 < 1.0 && b.relative2 < 1.0);
        let mc = simplex_mc_integrals(&p, 200_000, 17 + k).unwrap();
        if k >= 4 {
            assert!(mc.tail1_relative.value > 0.0 && mc.tail2_relative.value > 0.0, "k = {k}");
        }
        assert!(mc.tail1_relative.value <= b.relative1 + 3.0 * mc.tail1_relative.stderr, "k = {k}");
        assert!(mc.tail2_relative.value <= b.relative2 + 3.0 * mc.tail2_relative.stderr, "k = {k}");
    }
}

#[test]
fn ratios_agree_with_monte_carlo_when_the_simplex_does_not_bind() {
    for k in 2..=6u64 {
        let p = GParams::new(k, 1.5, 3.0, 0.6).unwrap();
        assert!(p.t <= p.tau);
        let r = moment_ratios(&p).unwrap();
        let mc = simplex_mc_integrals(&p, 200_000, 99 + k).unwrap();
        let i = mc.i_k.value;
        assert_eq!(mc.i_k.stderr, 0.0);
        let j_over_i = mc.j_k.value / i;
        let sigma = mc.j_k.stderr / i;
        assert!((j_over_i - r.main).abs() <= 3.0 * sigma + 1e-12, "k = {k}: {j_over_i} vs {}", r.main);
        assert!(j_over_i >= r.j_over_i - 3.0 * sigma);
        // I' is normalised by the integral with one coordinate integrated
        // out, which is J here.
        let ip = mc.i_prime.value / mc.j_k.value;
        let want = constrained_minimizer_ratio(&p).unwrap().ratio;
        let sigma = ip * (mc.i_prime.stderr / mc.i_prime.value + mc.j_k.stderr / mc.j_k.value);
        assert!((ip - want).abs() <= 3.0 * sigma + 1e-6 * want, "k = {k}: {ip} vs {want}");
    }
}

#[test]
fn k_two_ratios_are_one_dimensional_quotients() {
    let p = GParams::new(2, 2.0, 3.0, 0.5).unwrap();
    let g = |x: f64| g_eval(&p, x);
    let int_g = integrate(g, 0.0, p.t, 1e-14).integral;
    let nu = integrate(|x| g(x).powi(2), 0.0, p.t, 1e-14).integral;
    let r = moment_ratios(&p).unwrap();
    assert!((r.iprime_over_i - int_g * int_g / (2.0 * nu)).abs() < 1e-12);
}

#[test]
fn schedule_tails_decrease_with_k() {
    let mut last = f64::INFINITY;
    for e in [3.0f64, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0] {
        let k = 10f64.powf(e) as u64;
        let p = GParams::schedule(k, PsiChoice::LogLog, 1.0).unwrap();
        let rel = tail_bounds(&p).unwrap().relative1;
        assert!(rel < last, "k = {k}: {rel} >= {last}");
        last = rel;
    }
    assert!(last < 1.0);
}

#[test]
fn violated_centre_of_mass_is_reported() {
    let p = GParams::new(3, 1.5, 3.0, 1.5).unwrap();
    let err = tail_bounds(&p).unwrap_err();
    assert!(err.to_string().contains("center-of-mass condition violated"));
    assert!(moment_ratios(&p).is_err());
}

#[test]
fn monte_carlo_preconditions() {
    let p = GParams::new(3, 1.5, 3.0, 0.6).unwrap();
    assert!(simplex_mc_integrals(&p, 0, 1).is_err());
    assert!(simplex_mc_integrals(&GParams::new(11, 1.5, 3.0, 0.6).unwrap(), 20_000, 1).is_err());
    let a = simplex_mc_integrals(&p, 20_000, 5).unwrap();
    let b = simplex_mc_integrals(&p, 20_000, 5).unwrap();
    assert_eq!(a, b);
}

#[test]
fn fourier_identity_for_three_functions() {
    let reports = fourier_kernel_check(FourierOptions::default());
    assert_eq!(reports.len(), 3);
    for r in reports {
        assert!(r.abs_diff < 1e-4, "{r:?}");
    }
}
