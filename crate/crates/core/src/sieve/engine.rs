use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::config::SieveConfig;
use super::lambda::{sieve_divisors, Form, LambdaTable, WeightWalker};
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::primes::{gcd, mobius, PrimeTable};
use crate::variational::{GShape, SimplexProfile};

const CHUNK: u64 = 2048;

/// Inclusive range of `n` for the moment sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentRange {
    /// `[1, N]`.
    Full,
    /// `[ceil(N/2), N]`.
    Half,
    Custom { lo: u64, hi: u64 },
}

impl MomentRange {
    pub fn bounds(&self, n: u64) -> (u64, u64) {
        match *self {
            MomentRange::Full => (1, n),
            MomentRange::Half => (n.div_ceil(2), n),
            MomentRange::Custom { lo, hi } => (lo, hi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub n_max: u64,
    pub delta: f64,
    pub k: usize,
    pub r: u64,
    pub w: u64,
    pub b0: u64,
    pub lo: u64,
    pub hi: u64,
    pub m: i64,
    /// Number of `n ≡ b0 (mod W)` in the range.
    pub n_count: u64,
    pub sum_w2: f64,
    pub sum_prime_w2: Vec<f64>,
    /// Symmetric; the diagonal repeats `sum_prime_w2`.
    pub sum_pair_w2: Vec<Vec<f64>>,
    /// `Σ (Σ_i 1_P(n + h_i) - (m - 1)) w(n)²`.
    pub s_value: f64,
    pub ratios: Vec<f64>,
    pub pair_max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaoReport {
    pub i: usize,
    pub j: usize,
    pub lo: u64,
    pub hi: u64,
    /// `n` with `n + h_i`, `n + h_j` both prime and larger than `R`.
    pub checked: u64,
    pub violations: u64,
    pub max_deviation: f64,
    /// `n` outside the hypothesis where the two weights differ; shows the
    /// alternative coefficients are not identical to the original ones.
    pub differing_elsewhere: u64,
}

/// Sieve weights for one configuration, with everything needed to evaluate
/// them precomputed.
pub struct SieveEngine {
    cfg: SieveConfig,
    forms: Vec<Form>,
    profile: SimplexProfile,
    lambda: LambdaTable,
    primes: Arc<PrimeTable>,
}

impl SieveEngine {
    pub fn new(cfg: SieveConfig) -> Result<Self> {
        cfg.validate()?;
        let max_h = cfg.tuple.max().max(0) as u64;
        let primes = Arc::new(PrimeTable::up_to(cfg.n + max_h + 1, true)?);
        Self::with_primes(cfg, primes)
    }

    /// Reuses a prime table, which must cover `[0, N + max h]` and carry
    /// smallest prime factors.
    pub fn with_primes(cfg: SieveConfig, primes: Arc<PrimeTable>) -> Result<Self> {
        let forms = cfg
            .tuple
            .offsets()
            .iter()
            .map(|&h| Form { sign: 1, shift: h })
            .collect();
        let shape = cfg.shape;
        Self::from_forms(cfg, forms, shape, primes)
    }

    pub(crate) fn from_forms(
        cfg: SieveConfig,
        forms: Vec<Form>,
        shape: GShape,
        primes: Arc<PrimeTable>,
    ) -> Result<Self> {
        if !primes.has_spf() || primes.lo() != 0 {
            return Err(Error::domain("prime table must start at 0 and carry factor data"));
        }
        let profile = SimplexProfile::new(shape, forms.len(), 1.0 / shape.l)?;
        let lambda = LambdaTable::build(&profile, cfg.r, cfg.w)?;
        Ok(Self {
            cfg,
            forms,
            profile,
            lambda,
            primes,
        })
    }

    pub fn config(&self) -> &SieveConfig {
        &self.cfg
    }

    pub fn primes(&self) -> &Arc<PrimeTable> {
        &self.primes
    }

    pub fn dims(&self) -> usize {
        self.forms.len()
    }

    /// `f(0, ..., 0)`.
    pub fn f_origin(&self) -> f64 {
        self.lambda.origin
    }

    /// `f` evaluated directly, bypassing the coefficient table.
    pub fn f_value(&self, t: &[f64]) -> f64 {
        self.profile.f_value(t)
    }

    /// `λ_d = (∏ μ(d_i)) f(log d_1/log R, ...)`, or 0 when some `d_i` is not
    /// squarefree, `∏ d_i > R`, or `∏ d_i` shares a factor with `W`.
    pub fn lambda_coeff(&self, d: &[u64]) -> f64 {
        assert_eq!(d.len(), self.dims(), "divisor tuple has wrong length");
        let mut prod: u64 = 1;
        let mut sign = 1;
        for &di in d {
            assert!(di >= 1, "divisors must be positive");
            let mu = mobius(di);
            if mu == 0 {
                return 0.0;
            }
            sign *= mu;
            prod = match prod.checked_mul(di) {
                Some(p) if p <= self.cfg.r => p,
                _ => return 0.0,
            };
        }
        if gcd(prod, self.cfg.w) != 1 {
            return 0.0;
        }
        let mut entries: Vec<u32> = d.iter().filter(|&&x| x > 1).map(|&x| x as u32).collect();
        f64::from(sign) * self.lambda.get(&mut entries)
    }

    fn form_values(&self, n: u64) -> Result<Vec<u64>> {
        self.forms
            .iter()
            .map(|f| {
                let v = f.eval(n);
                if v < 1 {
                    return Err(Error::domain(format!("form value {v} at n = {n} is not positive")));
                }
                let v = v as u64;
                if !self.primes.contains(v) {
                    return Err(Error::domain(format!("form value {v} lies outside the prime table")));
                }
                Ok(v)
            })
            .collect()
    }

    /// `w(n) = Σ λ_d` over `d_i | n + h_i`.
    pub fn weight(&self, n: u64) -> Result<f64> {
        let values = self.form_values(n)?;
        let mut scratch = Scratch::new(self.dims());
        Ok(self.weight_of(&values, &mut scratch, None))
    }

    fn weight_of(&self, values: &[u64], s: &mut Scratch, alt: Option<(&LambdaTable, usize, usize)>) -> f64 {
        for (v, divs) in values.iter().zip(s.divisors.iter_mut()) {
            sieve_divisors(&self.primes, *v, self.cfg.r, self.cfg.w, &mut s.factors, divs);
        }
        WeightWalker {
            r: self.cfg.r,
            lambda: &self.lambda,
            alt,
        }
        .sum(&s.divisors)
    }

    fn class_members(&self, lo: u64, hi: u64) -> (u64, u64) {
        let w = self.cfg.w;
        let first = lo + (self.cfg.b0 % w + w - lo % w) % w;
        let count = if first > hi { 0 } else { (hi - first) / w + 1 };
        (first, count)
    }

    /// Moment sums over `n ≡ b0 (mod W)` in the range.
    pub fn moment_sums(&self, range: MomentRange, m: i64) -> Result<MomentReport> {
        let (lo, hi) = range.bounds(self.cfg.n);
        let lo = lo.max(1);
        let k = self.dims();
        let (first, count) = self.class_members(lo, hi);
        if count > 0 {
            self.form_values(first)?;
            self.form_values(first + (count - 1) * self.cfg.w)?;
        }
        let chunks = count.div_ceil(CHUNK);
        let parts: Vec<MomentAcc> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = MomentAcc::new(k);
                let mut scratch = Scratch::new(k);
                let start = c * CHUNK;
                let end = (start + CHUNK).min(count);
                let mut values = vec![0u64; k];
                let mut prime = vec![false; k];
                for idx in start..end {
                    let n = first + idx * self.cfg.w;
                    for (i, f) in self.forms.iter().enumerate() {
                        values[i] = f.eval(n) as u64;
                        prime[i] = self.primes.is_prime(values[i]);
                    }
                    let w = self.weight_of(&values, &mut scratch, None);
                    acc.push(w * w, &prime);
                }
                acc
            })
            .collect();
        let mut total = MomentAcc::new(k);
        for p in &parts {
            total.merge(p);
        }
        Ok(total.report(self, lo, hi, m, count))
    }

    /// Compares `w` with the weight built from `λ̃`, where `λ̃_d = λ_d` when
    /// `d_i = d_j = 1` and otherwise comes from `alt_shape`.
    pub fn tao_domination_check(
        &self,
        i: usize,
        j: usize,
        alt_shape: GShape,
        range: MomentRange,
    ) -> Result<TaoReport> {
        let k = self.dims();
        if i == j || i >= k || j >= k {
            return Err(Error::domain(format!("need distinct indices below {k}, got {i}, {j}")));
        }
        let alt_profile = SimplexProfile::new(alt_shape, k, 1.0 / alt_shape.l)?;
        let alt = LambdaTable::build(&alt_profile, self.cfg.r, self.cfg.w)?;
        let (lo, hi) = range.bounds(self.cfg.n);
        let lo = lo.max(1);
        let (first, count) = self.class_members(lo, hi);
        if count > 0 {
            self.form_values(first)?;
            self.form_values(first + (count - 1) * self.cfg.w)?;
        }
        let r = self.cfg.r;
        let chunks = count.div_ceil(CHUNK);
        let parts: Vec<(u64, u64, f64, u64)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut scratch = Scratch::new(k);
                let mut values = vec![0u64; k];
                let (mut checked, mut violations, mut max_dev, mut elsewhere) = (0, 0, 0.0f64, 0);
                for idx in c * CHUNK..((c + 1) * CHUNK).min(count) {
                    let n = first + idx * self.cfg.w;
                    for (v, f) in values.iter_mut().zip(&self.forms) {
                        *v = f.eval(n) as u64;
                    }
                    let w = self.weight_of(&values, &mut scratch, None);
                    let w_alt = self.weight_of(&values, &mut scratch, Some((&alt, i, j)));
                    let hyp = [values[i], values[j]]
                        .iter()
                        .all(|&v| v > r && self.primes.is_prime(v));
                    if hyp {
                        checked += 1;
                        let dev = (w - w_alt).abs();
                        if dev != 0.0 {
                            violations += 1;
                        }
                        max_dev = max_dev.max(dev);
                    } else if w != w_alt {
                        elsewhere += 1;
                    }
                }
                (checked, violations, max_dev, elsewhere)
            })
            .collect();
        let mut report = TaoReport {
            i,
            j,
            lo,
            hi,
            checked: 0,
            violations: 0,
            max_deviation: 0.0,
            differing_elsewhere: 0,
        };
        for (c, v, d, e) in parts {
            report.checked += c;
            report.violations += v;
            report.max_deviation = report.max_deviation.max(d);
            report.differing_elsewhere += e;
        }
        Ok(report)
    }

    pub(crate) fn weight_for_values(&self, values: &[u64], scratch: &mut Scratch) -> f64 {
        self.weight_of(values, scratch, None)
    }
}

pub(crate) struct Scratch {
    factors: Vec<u64>,
    divisors: Vec<Vec<(u64, i8)>>,
}

impl Scratch {
    pub fn new(dims: usize) -> Self {
        Self {
            factors: Vec::new(),
            divisors: vec![Vec::new(); dims],
        }
    }
}

#[derive(Clone)]
struct MomentAcc {
    w2: NeumaierSum,
    prime: Vec<NeumaierSum>,
    pair: Vec<NeumaierSum>,
    k: usize,
}

impl MomentAcc {
    fn new(k: usize) -> Self {
        Self {
            w2: NeumaierSum::new(),
            prime: vec![NeumaierSum::new(); k],
            pair: vec![NeumaierSum::new(); k * k],
            k,
        }
    }

    fn push(&mut self, w2: f64, prime: &[bool]) {
        self.w2.add(w2);
        for i in 0..self.k {
            if prime[i] {
                self.prime[i].add(w2);
                for j in i + 1..self.k {
                    if prime[j] {
                        self.pair[i * self.k + j].add(w2);
                    }
                }
            }
        }
    }

    fn merge(&mut self, other: &MomentAcc) {
        self.w2.merge(&other.w2);
        for (a, b) in self.prime.iter_mut().zip(&other.prime) {
            a.merge(b);
        }
        for (a, b) in self.pair.iter_mut().zip(&other.pair) {
            a.merge(b);
        }
    }

    fn report(&self, engine: &SieveEngine, lo: u64, hi: u64, m: i64, n_count: u64) -> MomentReport {
        let cfg = engine.config();
        let k = self.k;
        let sum_w2 = self.w2.value();
        let sum_prime_w2: Vec<f64> = self.prime.iter().map(NeumaierSum::value).collect();
        let mut sum_pair_w2 = vec![vec![0.0; k]; k];
        for i in 0..k {
            sum_pair_w2[i][i] = sum_prime_w2[i];
            for j in i + 1..k {
                let v = self.pair[i * k + j].value();
                sum_pair_w2[i][j] = v;
                sum_pair_w2[j][i] = v;
            }
        }
        let mut s = NeumaierSum::new();
        for &v in &sum_prime_w2 {
            s.add(v);
        }
        s.add(-((m - 1) as f64) * sum_w2);
        let ratio = |x: f64| if sum_w2 > 0.0 { x / sum_w2 } else { 0.0 };
        let mut pair_max = 0.0f64;
        for i in 0..k {
            for j in i + 1..k {
                pair_max = pair_max.max(ratio(sum_pair_w2[i][j]));
            }
        }
        MomentReport {
            n_max: cfg.n,
            delta: cfg.delta,
            k,
            r: cfg.r,
            w: cfg.w,
            b0: cfg.b0,
            lo,
            hi,
            m,
            n_count,
            sum_w2,
            ratios: sum_prime_w2.iter().map(|&x| ratio(x)).collect(),
            sum_prime_w2,
            sum_pair_w2,
            s_value: s.value(),
            pair_max_ratio: pair_max,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuples::Tuple;

    fn engine(k_offsets: &[i64], n: u64, delta: f64) -> SieveEngine {
        let cfg = SieveConfig::new(n, delta, Tuple::new(k_offsets.to_vec()).unwrap()).unwrap();
        SieveEngine::new(cfg).unwrap()
    }

    #[test]
    fn coefficient_support_rules() {
        let e = engine(&[0, 2, 6], 1_000_000, 0.4);
        assert_eq!(e.cfg.r, 251);
        let f0 = e.f_origin();
        assert!(f0 > 0.0);
        assert_eq!(e.lambda_coeff(&[1, 1, 1]), f0);
        assert_eq!(e.lambda_coeff(&[4, 1, 1]), 0.0);
        assert_eq!(e.lambda_coeff(&[3, 1, 1]), 0.0);
        assert_eq!(e.lambda_coeff(&[11, 13, 17]), 0.0);
        let v = e.lambda_coeff(&[11, 13, 1]);
        assert!(v > 0.0);
        assert_eq!(e.lambda_coeff(&[13, 1, 11]), v);
        assert!(e.lambda_coeff(&[11, 1, 1]) < 0.0);
    }

    #[test]
    fn single_form_examples() {
        let e = engine(&[0], 1_000_000, 0.4);
        let r = e.cfg.r;
        let log_r = (r as f64).ln();
        let f = |d: f64| e.f_value(&[d.ln() / log_r]);
        // a prime above R
        assert_eq!(e.weight(257).unwrap(), e.f_origin());
        // 11 * 13 = 143 <= R = 251
        let want = f(1.0) - f(11.0) - f(13.0) + f(143.0);
        assert!((e.weight(143).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn empty_range() {
        let e = engine(&[0, 2], 100_000, 0.25);
        let rep = e.moment_sums(MomentRange::Custom { lo: 50, hi: 40 }, 1).unwrap();
        assert_eq!(rep.n_count, 0);
        assert_eq!(rep.sum_w2, 0.0);
        assert!(rep.sum_prime_w2.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn single_form_direct_loop() {
        let e = engine(&[0], 100_000, 0.5);
        let rep = e.moment_sums(MomentRange::Custom { lo: 1, hi: 3000 }, 1).unwrap();
        let mut direct = 0.0;
        let mut count = 0;
        for n in 1..=3000u64 {
            if n % e.cfg.w == e.cfg.b0 % e.cfg.w {
                let w = e.weight(n).unwrap();
                direct += w * w;
                count += 1;
            }
        }
        assert_eq!(rep.n_count, count);
        assert!((rep.sum_w2 - direct).abs() <= 1e-12 * direct);
    }
}
