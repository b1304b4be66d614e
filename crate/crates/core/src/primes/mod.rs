//! Prime tables and the prime-derived sequences built on them.

mod table;

use std::collections::BTreeMap;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::fmt_sig;

pub use table::{simple_sieve, PrimeTable, DEFAULT_MEMORY_BUDGET};

/// Whether `n` is a sum of two primes, using a table that covers `[0, n]`.
pub fn is_goldbach(table: &PrimeTable, n: u64) -> bool {
    if n < 4 {
        return false;
    }
    if n % 2 == 1 {
        return table.is_prime(n - 2);
    }
    table
        .primes()
        .iter()
        .take_while(|&&p| p <= n / 2)
        .any(|&p| table.is_prime(n - p))
}

/// Every integer in `[4, limit]` expressible as `p + q` with `p`, `q` prime,
/// in increasing order.
pub fn goldbach_numbers(limit: u64) -> Result<Vec<u64>> {
    if limit < 4 {
        return Err(Error::domain(format!("limit must be at least 4, got {limit}")));
    }
    let table = PrimeTable::up_to(limit, false)?;
    Ok(goldbach_numbers_in(&table, limit))
}

pub(crate) fn goldbach_numbers_in(table: &PrimeTable, limit: u64) -> Vec<u64> {
    (4..=limit)
        .into_par_iter()
        .filter(|&n| is_goldbach(table, n))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GoldbachGaps {
    pub limit: u64,
    pub count: usize,
    /// Differences between consecutive Goldbach numbers.
    pub gaps: Vec<u64>,
    pub max_gap: u64,
    /// First Goldbach number followed by a gap of size `max_gap`.
    pub max_gap_at: u64,
}

pub fn goldbach_gaps(limit: u64) -> Result<GoldbachGaps> {
    let numbers = goldbach_numbers(limit)?;
    let gaps: Vec<u64> = numbers.windows(2).map(|w| w[1] - w[0]).collect();
    let (mut max_gap, mut max_gap_at) = (0, numbers[0]);
    for (i, &g) in gaps.iter().enumerate() {
        if g > max_gap {
            max_gap = g;
            max_gap_at = numbers[i];
        }
    }
    Ok(GoldbachGaps {
        limit,
        count: numbers.len(),
        gaps,
        max_gap,
        max_gap_at,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GapMode {
    /// Pairs of primes `p' < p <= limit` with `p - p' = m`.
    #[default]
    AllPairs,
    /// Only consecutive primes.
    Consecutive,
}

/// For each `m` in `1..=max_diff`, the number of prime pairs `(p', p)` with
/// `p <= limit` and `p - p' = m`.
pub fn gap_counts(limit: u64, max_diff: u64, mode: GapMode) -> Result<BTreeMap<u64, u64>> {
    if max_diff == 0 {
        return Err(Error::domain("max_diff must be at least 1"));
    }
    let table = PrimeTable::up_to(limit, false)?;
    Ok(gap_counts_in(&table, max_diff, mode))
}

pub(crate) fn gap_counts_in(table: &PrimeTable, max_diff: u64, mode: GapMode) -> BTreeMap<u64, u64> {
    debug_assert_eq!(table.lo(), 0);
    match mode {
        GapMode::AllPairs => {
            let len = table.hi();
            let counts: Vec<u64> = (1..=max_diff)
                .into_par_iter()
                .map(|m| shifted_pair_count(table.words(), len, m))
                .collect();
            (1..=max_diff).zip(counts).collect()
        }
        GapMode::Consecutive => {
            let mut out: BTreeMap<u64, u64> = (1..=max_diff).map(|m| (m, 0)).collect();
            for w in table.primes().windows(2) {
                if let Some(c) = out.get_mut(&(w[1] - w[0])) {
                    *c += 1;
                }
            }
            out
        }
    }
}

/// Number of `i` in `[0, len - m)` with bits `i` and `i + m` both set.
fn shifted_pair_count(words: &[u64], len: u64, m: u64) -> u64 {
    if m >= len {
        return 0;
    }
    let n = len - m;
    let q = (m / 64) as usize;
    let r = (m % 64) as u32;
    let shifted = |j: usize| -> u64 {
        let low = words.get(j + q).copied().unwrap_or(0);
        if r == 0 {
            low
        } else {
            let high = words.get(j + q + 1).copied().unwrap_or(0);
            (low >> r) | (high << (64 - r))
        }
    };
    let full = (n / 64) as usize;
    let rem = n % 64;
    let mut count: u64 = (0..full)
        .map(|j| (words[j] & shifted(j)).count_ones() as u64)
        .sum();
    if rem > 0 {
        let mask = (1u64 << rem) - 1;
        count += (words[full] & shifted(full) & mask).count_ones() as u64;
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapEntry {
    pub p: u64,
    pub gap: u64,
    /// `gap / ln p`.
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapSequence {
    pub limit: u64,
    pub entries: Vec<GapEntry>,
}

impl GapSequence {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "p,gap,normalized")?;
        for e in &self.entries {
            writeln!(w, "{},{},{}", e.p, e.gap, fmt_sig(e.normalized, 12))?;
        }
        Ok(())
    }
}

/// Consecutive prime gaps `p_{n+1} - p_n` with `p_{n+1} <= limit`, together
/// with `gap / ln p_n`.
pub fn normalized_gaps(limit: u64) -> Result<GapSequence> {
    let table = PrimeTable::up_to(limit, false)?;
    let entries = table
        .primes()
        .windows(2)
        .map(|w| GapEntry {
            p: w[0],
            gap: w[1] - w[0],
            normalized: (w[1] - w[0]) as f64 / (w[0] as f64).ln(),
        })
        .collect();
    Ok(GapSequence { limit, entries })
}

/// Product of all primes `p <= bound`.
pub fn primorial(bound: f64) -> Result<u64> {
    if bound.is_nan() {
        return Err(Error::domain("bound is NaN"));
    }
    let mut acc: u64 = 1;
    let mut p: u64 = 2;
    while (p as f64) <= bound {
        if is_prime_trial(p) {
            acc = acc
                .checked_mul(p)
                .ok_or(Error::PrimorialOverflow { prime: p })?;
        }
        p += 1;
    }
    Ok(acc)
}

/// Largest prime factor of `m`, with the convention that it is 1 for `m = 1`.
pub fn largest_prime_factor(m: i64) -> Result<u64> {
    if m <= 0 {
        return Err(Error::domain(format!("largest prime factor needs m >= 1, got {m}")));
    }
    let mut n = m as u64;
    let mut largest = 1;
    let mut d = 2;
    while d * d <= n {
        while n % d == 0 {
            largest = d;
            n /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        largest = n;
    }
    Ok(largest)
}

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            while m % d == 0 {
                m /= d;
            }
            result -= result / d;
        }
        d += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Möbius function by trial division.
pub fn mobius(n: u64) -> i32 {
    if n == 0 {
        return 0;
    }
    let mut m = n;
    let mut sign = 1;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
