use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use super::params::GParams;
use super::simplex::SimplexProfile;
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

pub const MIN_SAMPLES: u64 = 10_000;
pub const MAX_K: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    /// Coordinates drawn independently from `g² / ν` on `[0, T]`.
    #[default]
    ProductImportance,
    /// Points drawn uniformly from the simplex by exponential spacings.
    UniformSimplex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McOptions {
    pub sampler: Sampler,
    /// Samples per independent random stream. Fixing it makes the totals
    /// independent of the number of worker threads.
    pub chunk_size: u64,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            sampler: Sampler::ProductImportance,
            chunk_size: 8192,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimates {
    pub k: u64,
    pub n_samples: u64,
    pub seed: u64,
    pub sampler: Sampler,
    pub i_k: Estimate,
    pub j_k: Estimate,
    pub i_prime: Estimate,
    pub tail1: Estimate,
    pub tail2: Estimate,
    /// `tail1` divided by `k^{-k} ν^k`.
    pub tail1_relative: Estimate,
    /// `tail2` divided by `k^{-(k+1)} ν^{k-1} (∫g)²`.
    pub tail2_relative: Estimate,
}

const QUANTITIES: usize = 5;
const I: usize = 0;
const J: usize = 1;
const IP: usize = 2;
const T1: usize = 3;
const T2: usize = 4;

#[derive(Clone, Default)]
struct Moments {
    sum: [NeumaierSum; QUANTITIES],
    sq: [NeumaierSum; QUANTITIES],
}

impl Moments {
    fn push(&mut self, q: usize, x: f64) {
        self.sum[q].add(x);
        self.sq[q].add(x * x);
    }

    fn merge(&mut self, other: &Moments) {
        for q in 0..QUANTITIES {
            self.sum[q].merge(&other.sum[q]);
            self.sq[q].merge(&other.sq[q]);
        }
    }

    fn estimate(&self, q: usize, n: f64, scale: f64) -> Estimate {
        let mean = self.sum[q].value() / n;
        let var = ((self.sq[q].value() / n - mean * mean) * n / (n - 1.0)).max(0.0);
        Estimate {
            value: scale * mean,
            stderr: scale * (var / n).sqrt(),
        }
    }
}

pub fn simplex_mc_integrals(params: &GParams, n_samples: u64, seed: u64) -> Result<McEstimates> {
    simplex_mc_integrals_with(params, n_samples, seed, McOptions::default())
}

/// Monte Carlo estimates of `I_k`, `J_k`, `I'` and the two tail integrals.
///
/// The tails are always estimated with the product sampler, under which the
/// tail integral is `(ν/k)^k` times a probability.
pub fn simplex_mc_integrals_with(
    params: &GParams,
    n_samples: u64,
    seed: u64,
    opts: McOptions,
) -> Result<McEstimates> {
    params.validate()?;
    if params.k > MAX_K {
        return Err(Error::domain(format!(
            "Monte Carlo integrals support k <= {MAX_K}, got {}",
            params.k
        )));
    }
    if n_samples < MIN_SAMPLES {
        return Err(Error::domain(format!(
            "n_samples must be at least {MIN_SAMPLES}, got {n_samples}"
        )));
    }
    if opts.chunk_size == 0 {
        return Err(Error::domain("chunk size must be positive"));
    }
    let shape = params.shape();
    let k = params.k as usize;
    let kf = params.kf();
    let profile = SimplexProfile::new(shape, k, params.tau)?;
    let (nu, int_g) = (shape.nu(), shape.int_g());
    let epsilon = (1.0 - params.t / kf) / params.l;

    let n_chunks = n_samples.div_ceil(opts.chunk_size);
    let parts: Vec<Moments> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = opts.chunk_size.min(n_samples - c * opts.chunk_size);
            let mut m = Moments::default();
            let mut x = vec![0.0; k];
            let mut e = vec![0.0; k + 1];
            for _ in 0..count {
                for xi in x.iter_mut() {
                    let q = rng.random::<f64>() * nu;
                    *xi = q * shape.l * shape.l / (1.0 - q * shape.l * shape.a);
                }
                let s_all: f64 = x.iter().sum();
                let s_tail: f64 = x[1..].iter().sum();
                m.push(T1, f64::from(u8::from(s_all >= kf * epsilon)));
                m.push(T2, f64::from(u8::from(s_tail >= kf * epsilon)));
                match opts.sampler {
                    Sampler::ProductImportance => {
                        let sum_t = s_all / kf;
                        let rest_j = s_tail / kf;
                        let rest_ip = x[1..k - 1].iter().sum::<f64>() / kf;
                        m.push(I, f64::from(u8::from(sum_t <= params.tau)));
                        m.push(J, j_term(&profile, rest_j));
                        m.push(IP, ip_term(&profile, rest_ip));
                    }
                    Sampler::UniformSimplex => {
                        for ei in e.iter_mut() {
                            *ei = Exp1.sample(&mut rng);
                        }
                        m.push(I, uniform_term(&profile, &e[..=k], |_| 1.0));
                        m.push(J, uniform_term(&profile, &e[..k], |s| j_term(&profile, s)));
                        m.push(IP, uniform_term(&profile, &e[..k - 1], |s| ip_term(&profile, s)));
                    }
                }
            }
            m
        })
        .collect();
    let mut total = Moments::default();
    for p in &parts {
        total.merge(p);
    }

    let n = n_samples as f64;
    let unit = nu / kf;
    let (si, sj, sip) = match opts.sampler {
        Sampler::ProductImportance => (unit.powi(k as i32), unit.powi(k as i32 - 1), unit.powi(k as i32 - 2)),
        Sampler::UniformSimplex => (
            simplex_volume(params.tau, k),
            simplex_volume(params.tau, k - 1),
            simplex_volume(params.tau, k - 2),
        ),
    };
    let main2 = (int_g / kf).powi(2) * unit.powi(k as i32 - 1);
    Ok(McEstimates {
        k: params.k,
        n_samples,
        seed,
        sampler: opts.sampler,
        i_k: total.estimate(I, n, si),
        j_k: total.estimate(J, n, sj),
        i_prime: total.estimate(IP, n, sip),
        tail1: total.estimate(T1, n, unit.powi(k as i32)),
        tail2: total.estimate(T2, n, main2),
        tail1_relative: total.estimate(T1, n, 1.0),
        tail2_relative: total.estimate(T2, n, 1.0),
    })
}

fn j_term(profile: &SimplexProfile, sum: f64) -> f64 {
    if sum > profile.tau {
        return 0.0;
    }
    profile.gamma(profile.tau - sum).powi(2)
}

fn ip_term(profile: &SimplexProfile, sum: f64) -> f64 {
    if sum > profile.tau {
        return 0.0;
    }
    profile.pair_mass(profile.tau - sum).powi(2) / (1.0 - sum).powi(2)
}

/// With `e` holding `m + 1` exponentials, maps them to a uniform point of the
/// `m`-simplex of size `τ` and returns `∏ g(k t_i)² · tail(Σ t)`.
fn uniform_term(profile: &SimplexProfile, e: &[f64], tail: impl Fn(f64) -> f64) -> f64 {
    let total: f64 = e.iter().sum();
    let m = e.len() - 1;
    let kf = profile.k as f64;
    let mut prod = 1.0;
    let mut sum = 0.0;
    for &ei in &e[..m] {
        let t = profile.tau * ei / total;
        let g = profile.shape.eval(kf * t);
        prod *= g * g;
        sum += t;
    }
    if prod == 0.0 {
        return 0.0;
    }
    prod * tail(sum)
}

fn simplex_volume(tau: f64, m: usize) -> f64 {
    (1..=m).fold(1.0, |acc, i| acc * tau / i as f64)
}
