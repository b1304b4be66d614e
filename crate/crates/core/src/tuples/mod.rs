//! Admissible tuples of shifts.

mod surfing;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::simple_sieve;

pub use surfing::{surfing, surfing_size, SurfingStep, SurfingTrace};

/// A strictly increasing list of integer offsets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Tuple {
    offsets: Vec<i64>,
}

impl Tuple {
    pub fn new(offsets: Vec<i64>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::domain("a tuple needs at least one offset"));
        }
        if let Some(w) = offsets.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::domain(format!(
                "offsets must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Self { offsets })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(mut offsets: Vec<i64>) -> Result<Self> {
        offsets.sort_unstable();
        offsets.dedup();
        Self::new(offsets)
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn k(&self) -> usize {
        self.offsets.len()
    }

    pub fn span(&self) -> i64 {
        self.offsets[self.offsets.len() - 1] - self.offsets[0]
    }

    pub fn max(&self) -> i64 {
        self.offsets[self.offsets.len() - 1]
    }

    pub fn min(&self) -> i64 {
        self.offsets[0]
    }

    pub fn is_admissible(&self) -> bool {
        is_admissible(self).admissible
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.offsets.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

impl FromStr for Tuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let offsets = s
            .trim()
            .trim_start_matches('{')
            .trim_end_matches('}')
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::domain(format!("bad offset {part:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Tuple::new(offsets)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilityWitness {
    pub prime: u64,
    /// Residues occupied modulo `prime` (all of them).
    pub occupied: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub witness: Option<AdmissibilityWitness>,
}

/// Checks that for each prime `p <= k` some residue class mod `p` is missed.
pub fn is_admissible(t: &Tuple) -> Admissibility {
    for p in simple_sieve(t.k() as u64) {
        let occupied = occupied_classes(t.offsets(), p);
        if occupied.len() as u64 == p {
            return Admissibility {
                admissible: false,
                witness: Some(AdmissibilityWitness { prime: p, occupied }),
            };
        }
    }
    Admissibility {
        admissible: true,
        witness: None,
    }
}

fn occupied_classes(offsets: &[i64], p: u64) -> Vec<u64> {
    let mut seen = vec![false; p as usize];
    for &h in offsets {
        seen[h.rem_euclid(p as i64) as usize] = true;
    }
    (0..p).filter(|&r| seen[r as usize]).collect()
}

/// The union of `t` with its reflection `{n - h}`.
pub fn mirror_union(t: &Tuple, n: i64) -> Result<Tuple> {
    for &h in t.offsets() {
        if t.offsets().binary_search(&(n - h)).is_ok() {
            return Err(Error::MirrorCollision {
                h,
                h_mirror: n - h,
            });
        }
    }
    if n <= 2 * t.max() {
        return Err(Error::domain(format!(
            "reflection point {n} must exceed twice the largest offset {}",
            t.max()
        )));
    }
    let mut all: Vec<i64> = t.offsets().to_vec();
    all.extend(t.offsets().iter().map(|&h| n - h));
    Tuple::from_unsorted(all)
}

/// Greedy admissible `k`-tuple of small span.
///
/// Starting from `0..width`, removes for each prime `p <= k` the residue
/// class holding the fewest surviving candidates (smallest residue on ties),
/// then takes the narrowest window of `k` consecutive survivors. The width
/// doubles until enough candidates survive.
pub fn densest_tuple(k: usize, search_width: usize) -> Result<Tuple> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if search_width < k {
        return Err(Error::domain(format!(
            "search width {search_width} is smaller than k = {k}"
        )));
    }
    let primes = simple_sieve(k as u64);
    let mut width = search_width;
    loop {
        let mut cand: Vec<i64> = (0..width as i64).collect();
        for &p in &primes {
            let mut counts = vec![0usize; p as usize];
            for &c in &cand {
                counts[(c % p as i64) as usize] += 1;
            }
            let drop = (0..p as usize).min_by_key(|&r| counts[r]).unwrap_or(0) as i64;
            cand.retain(|&c| c % p as i64 != drop);
        }
        if cand.len() >= k {
            let start = (0..=cand.len() - k)
                .min_by_key(|&i| cand[i + k - 1] - cand[i])
                .unwrap_or(0);
            let base = cand[start];
            let offsets = cand[start..start + k].iter().map(|&c| c - base).collect();
            return Tuple::new(offsets);
        }
        width *= 2;
    }
}
