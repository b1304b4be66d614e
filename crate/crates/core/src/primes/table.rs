use rayon::prelude::*;

use crate::error::{Error, Result};

const SEGMENT: u64 = 1 << 20;

/// Default memory budget for a table, in bytes.
pub const DEFAULT_MEMORY_BUDGET: u64 = 3 << 30;

/// Primality bitset over a half-open range `[lo, hi)`, optionally with the
/// smallest prime factor of every entry.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    lo: u64,
    hi: u64,
    words: Vec<u64>,
    spf: Option<Vec<u32>>,
    primes: Vec<u64>,
}

struct Segment {
    words: Vec<u64>,
    spf: Option<Vec<u32>>,
    primes: Vec<u64>,
}

impl PrimeTable {
    /// Sieves `[lo, hi)` using the default memory budget.
    pub fn new(lo: u64, hi: u64, with_spf: bool) -> Result<Self> {
        Self::with_budget(lo, hi, with_spf, DEFAULT_MEMORY_BUDGET)
    }

    /// Sieves `[0, limit]`.
    pub fn up_to(limit: u64, with_spf: bool) -> Result<Self> {
        let hi = limit
            .checked_add(1)
            .ok_or_else(|| Error::domain("limit too large"))?;
        Self::new(0, hi, with_spf)
    }

    pub fn with_budget(lo: u64, hi: u64, with_spf: bool, budget: u64) -> Result<Self> {
        if hi < lo {
            return Err(Error::domain(format!("empty range [{lo}, {hi})")));
        }
        if hi > u64::MAX / 2 {
            return Err(Error::domain("upper bound exceeds 2^63"));
        }
        let span = hi - lo;
        let requested = estimate_bytes(lo, hi, with_spf);
        if requested > budget {
            return Err(Error::Resource {
                what: "prime table memory (bytes)",
                requested,
                budget,
            });
        }
        let root = hi.saturating_sub(1).isqrt();
        let base = simple_sieve(root);
        let n_segments = span.div_ceil(SEGMENT);
        let segments: Vec<Segment> = (0..n_segments)
            .into_par_iter()
            .map(|s| {
                let a = lo + s * SEGMENT;
                let b = (a + SEGMENT).min(hi);
                sieve_segment(a, b, &base, with_spf)
            })
            .collect();

        let mut words = Vec::with_capacity(span.div_ceil(64) as usize);
        let mut spf = with_spf.then(|| Vec::with_capacity(span as usize));
        let mut primes = Vec::new();
        for seg in segments {
            words.extend_from_slice(&seg.words);
            if let (Some(all), Some(part)) = (spf.as_mut(), seg.spf) {
                all.extend_from_slice(&part);
            }
            primes.extend_from_slice(&seg.primes);
        }
        Ok(Self {
            lo,
            hi,
            words,
            spf,
            primes,
        })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn contains(&self, n: u64) -> bool {
        (self.lo..self.hi).contains(&n)
    }

    /// Primality of `n`; panics when `n` lies outside the table.
    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(
            self.contains(n),
            "{n} outside prime table [{}, {})",
            self.lo,
            self.hi
        );
        let i = n - self.lo;
        (self.words[(i >> 6) as usize] >> (i & 63)) & 1 == 1
    }

    /// Smallest prime factor of `n`, or `None` for `n < 2` or when the table
    /// was built without factor data.
    #[inline]
    pub fn spf(&self, n: u64) -> Option<u64> {
        let spf = self.spf.as_ref()?;
        if n < 2 {
            return None;
        }
        assert!(self.contains(n), "{n} outside prime table");
        match spf[(n - self.lo) as usize] {
            0 => Some(n),
            p => Some(p as u64),
        }
    }

    pub fn has_spf(&self) -> bool {
        self.spf.is_some()
    }

    /// Distinct prime factors of `n` in increasing order, appended to `out`.
    pub fn distinct_factors(&self, mut n: u64, out: &mut Vec<u64>) {
        out.clear();
        while n > 1 {
            let p = self.spf(n).expect("table built with smallest prime factors");
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
    }

    /// Primes in the table, increasing.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn prime_count(&self) -> usize {
        self.primes.len()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

fn estimate_bytes(lo: u64, hi: u64, with_spf: bool) -> u64 {
    let span = hi - lo;
    let bits = span.div_ceil(8);
    let spf = if with_spf { span.saturating_mul(4) } else { 0 };
    let ln = (hi.max(16) as f64).ln();
    let density = if lo < 16 { 1.3 / ln } else { 1.2 / (lo as f64).ln().max(1.0) };
    let primes = (span as f64 * density * 8.0) as u64;
    bits + spf + primes
}

/// Primes up to and including `n` by the plain sieve of Eratosthenes.
pub fn simple_sieve(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn sieve_segment(a: u64, b: u64, base: &[u64], with_spf: bool) -> Segment {
    let len = (b - a) as usize;
    let mut words = vec![u64::MAX; len.div_ceil(64)];
    if len % 64 != 0 {
        let last = words.len() - 1;
        words[last] = (1u64 << (len % 64)) - 1;
    }
    let mut spf = with_spf.then(|| vec![0u32; len]);
    for n in a..b.min(2) {
        let i = (n - a) as usize;
        words[i >> 6] &= !(1u64 << (i & 63));
    }
    for &p in base {
        let p2 = p * p;
        if p2 >= b {
            break;
        }
        let start = p2.max(a.div_ceil(p) * p);
        let mut m = start;
        while m < b {
            let i = (m - a) as usize;
            words[i >> 6] &= !(1u64 << (i & 63));
            if let Some(s) = spf.as_mut() {
                if s[i] == 0 {
                    s[i] = p as u32;
                }
            }
            m += p;
        }
    }
    let mut primes = Vec::new();
    for (w, &word) in words.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let t = bits.trailing_zeros() as u64;
            primes.push(a + 64 * w as u64 + t);
            bits &= bits - 1;
        }
    }
    Segment { words, spf, primes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn matches_trial_division() {
        let t = PrimeTable::up_to(5000, true).unwrap();
        for n in 0..=5000 {
            assert_eq!(t.is_prime(n), trial(n), "n = {n}");
        }
        assert_eq!(t.prime_count(), 669);
    }

    #[test]
    fn offset_range_spans_segments() {
        let lo = 3 * SEGMENT - 1000;
        let t = PrimeTable::new(lo, lo + 2 * SEGMENT + 77, false).unwrap();
        for n in (lo..lo + 3000).chain(lo + 2 * SEGMENT..lo + 2 * SEGMENT + 77) {
            assert_eq!(t.is_prime(n), trial(n), "n = {n}");
        }
    }

    #[test]
    fn smallest_prime_factor() {
        let t = PrimeTable::up_to(1000, true).unwrap();
        assert_eq!(t.spf(1), None);
        assert_eq!(t.spf(2), Some(2));
        assert_eq!(t.spf(91), Some(7));
        assert_eq!(t.spf(997), Some(997));
        let mut f = Vec::new();
        t.distinct_factors(360, &mut f);
        assert_eq!(f, vec![2, 3, 5]);
    }

    #[test]
    fn budget_is_enforced() {
        let err = PrimeTable::with_budget(0, 1 << 30, true, 1 << 20).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }));
    }

    #[test]
    fn pi_of_a_million() {
        let t = PrimeTable::up_to(1_000_000, false).unwrap();
        assert_eq!(t.prime_count(), 78_498);
    }
}
