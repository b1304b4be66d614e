use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::config::SieveConfig;
use super::engine::{Scratch, SieveEngine};
use super::lambda::Form;
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::primes::PrimeTable;
use crate::tuples::mirror_union;
use crate::variational::GShape;

const CHUNK: u64 = 1024;

/// `n` with `n + h_i` and `N - n - h_j` both prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GoldbachWitness {
    pub n: u64,
    pub i: usize,
    pub j: usize,
    pub p: u64,
    pub q: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowReport {
    pub big_n: u64,
    pub k: usize,
    pub r: u64,
    pub lo: u64,
    pub hi: u64,
    pub n_count: u64,
    pub sum_w2: f64,
    /// `Σ X(n) w(n)²`, `X(n)` the number of prime entries among the `2k` forms.
    pub s_tilde: f64,
    /// `Σ 1_{X > 0} w(n)²`.
    pub positive_mass: f64,
    /// Ordered pairs `h != h'` inside the same half.
    pub pairs_same: f64,
    /// Ordered pairs across the halves.
    pub pairs_cross: f64,
    /// `S̃² <= Σ 1_{X>0} w² · Σ X² w²`.
    pub cs_holds: bool,
    /// The variant without the diagonal, `S̃² <= Σ 1_{X>0} w² · Σ_{h != h'}`.
    /// Informational only; it can fail when few `n` carry two primes.
    pub off_diagonal_form_holds: bool,
    pub witness: Option<GoldbachWitness>,
}

/// Reusable scanner: one coefficient table in `2k` dimensions, evaluated
/// against the mirrored forms for any even `N`.
pub struct GoldbachWindow {
    cfg: SieveConfig,
    engine: SieveEngine,
}

impl GoldbachWindow {
    /// The prime table must cover every `N` that will be scanned.
    pub fn new(cfg: SieveConfig, primes: Arc<PrimeTable>) -> Result<Self> {
        cfg.validate()?;
        let shape = GShape {
            t: 2.0 * cfg.shape.t,
            ..cfg.shape
        };
        let k = cfg.k();
        let placeholder = vec![Form { sign: 1, shift: 0 }; 2 * k];
        let engine = SieveEngine::from_forms(cfg.clone(), placeholder, shape, primes)?;
        Ok(Self { cfg, engine })
    }

    pub fn config(&self) -> &SieveConfig {
        &self.cfg
    }

    pub fn scan(&self, big_n: u64) -> Result<WindowReport> {
        let h = self.cfg.tuple.offsets();
        let k = h.len();
        if h[0] < 0 {
            return Err(Error::domain("window scan needs nonnegative offsets"));
        }
        mirror_union(&self.cfg.tuple, big_n as i64)?;
        let max_h = self.cfg.tuple.max() as u64;
        let lo = big_n.div_ceil(2);
        let hi = big_n.saturating_sub(max_h + 1);
        let primes = self.engine.primes();
        if !primes.contains(big_n + max_h) {
            return Err(Error::domain(format!(
                "prime table ends at {}, scan needs {}",
                primes.hi(),
                big_n + max_h
            )));
        }
        let forms: Vec<Form> = h
            .iter()
            .map(|&s| Form { sign: 1, shift: s })
            .chain(h.iter().map(|&s| Form {
                sign: -1,
                shift: big_n as i64 - s,
            }))
            .collect();
        let count = if hi >= lo { hi - lo + 1 } else { 0 };
        let chunks = count.div_ceil(CHUNK);
        let parts: Vec<WindowAcc> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = WindowAcc::default();
                let mut scratch = Scratch::new(2 * k);
                let mut values = vec![0u64; 2 * k];
                let mut a = vec![false; 2 * k];
                for n in lo + c * CHUNK..=(lo + (c + 1) * CHUNK - 1).min(hi) {
                    for ((v, ai), f) in values.iter_mut().zip(a.iter_mut()).zip(&forms) {
                        *v = f.eval(n) as u64;
                        *ai = primes.is_prime(*v);
                    }
                    if acc.witness.is_none() {
                        acc.witness = find_witness(n, &a, &values, k);
                    }
                    let w = self.engine.weight_for_values(&values, &mut scratch);
                    acc.push(w * w, &a, k);
                }
                acc
            })
            .collect();
        let mut total = WindowAcc::default();
        for p in &parts {
            total.merge(p);
        }
        let s = total.s_tilde.value();
        let pos = total.positive.value();
        let same = total.same.value();
        let cross = total.cross.value();
        let slack = 1.0 + 1e-12;
        Ok(WindowReport {
            big_n,
            k,
            r: self.cfg.r,
            lo,
            hi,
            n_count: count,
            sum_w2: total.w2.value(),
            s_tilde: s,
            positive_mass: pos,
            pairs_same: same,
            pairs_cross: cross,
            cs_holds: s * s <= pos * (s + same + cross) * slack,
            off_diagonal_form_holds: s * s <= pos * (same + cross) * slack,
            witness: total.witness,
        })
    }
}

/// Scans one `N`, building a prime table for it.
pub fn goldbach_window_scan(cfg: &SieveConfig, big_n: u64) -> Result<WindowReport> {
    let max_h = cfg.tuple.max().max(0) as u64;
    let primes = Arc::new(PrimeTable::up_to(big_n.max(cfg.n) + max_h + 1, true)?);
    GoldbachWindow::new(cfg.clone(), primes)?.scan(big_n)
}

fn find_witness(n: u64, a: &[bool], values: &[u64], k: usize) -> Option<GoldbachWitness> {
    for i in 0..k {
        if !a[i] {
            continue;
        }
        for j in 0..k {
            if a[k + j] {
                return Some(GoldbachWitness {
                    n,
                    i,
                    j,
                    p: values[i],
                    q: values[k + j],
                });
            }
        }
    }
    None
}

#[derive(Default)]
struct WindowAcc {
    w2: NeumaierSum,
    s_tilde: NeumaierSum,
    positive: NeumaierSum,
    same: NeumaierSum,
    cross: NeumaierSum,
    witness: Option<GoldbachWitness>,
}

impl WindowAcc {
    fn push(&mut self, w2: f64, a: &[bool], k: usize) {
        let left = a[..k].iter().filter(|&&x| x).count() as f64;
        let right = a[k..].iter().filter(|&&x| x).count() as f64;
        let x = left + right;
        self.w2.add(w2);
        if x > 0.0 {
            self.s_tilde.add(x * w2);
            self.positive.add(w2);
            self.same.add((left * (left - 1.0) + right * (right - 1.0)) * w2);
            self.cross.add(2.0 * left * right * w2);
        }
    }

    fn merge(&mut self, other: &WindowAcc) {
        self.w2.merge(&other.w2);
        self.s_tilde.merge(&other.s_tilde);
        self.positive.merge(&other.positive);
        self.same.merge(&other.same);
        self.cross.merge(&other.cross);
        if self.witness.is_none() {
            self.witness = other.witness;
        }
    }
}
