use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::simple_sieve;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfingStep {
    pub prime: u64,
    /// Residue class removed from both sets.
    pub removed_class: u64,
    /// Elements of `U_i ∪ T_i` in the removed class.
    pub occupied: u64,
    pub len_before: u64,
    pub len_after: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfingTrace {
    pub k: u64,
    /// The lengths `ℓ_0, ℓ_1, ...`, one per step plus the initial length.
    pub lengths: Vec<u64>,
    pub steps: Vec<SurfingStep>,
    pub x: Vec<u64>,
    pub y: Vec<u64>,
}

/// `3^m k` where `m` is the number of primes up to `2k`.
pub fn surfing_size(k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let m = simple_sieve(2 * k).len() as u32;
    3u64.checked_pow(m)
        .and_then(|p| p.checked_mul(k))
        .ok_or(Error::Resource {
            what: "surfing set size 3^m k",
            requested: u64::MAX,
            budget: u64::MAX,
        })
}

/// Extracts `X ⊆ U`, `Y ⊆ T` of size `k` each whose union is admissible.
///
/// For each odd prime `p <= 2k` in turn, the residue class mod `p` holding
/// the fewest elements of the current union is removed from both sets, and
/// each set is cut down to its `⌈ℓ (p - 2) / p⌉` smallest elements.
pub fn surfing(u: &[u64], t: &[u64], k: u64) -> Result<SurfingTrace> {
    let ell = surfing_size(k)?;
    for (name, set) in [("U", u), ("T", t)] {
        if set.len() as u64 != ell {
            return Err(Error::domain(format!(
                "|{name}| = {} but k = {k} needs exactly {ell} elements",
                set.len()
            )));
        }
        if let Some(&bad) = set.iter().find(|&&x| x == 0 || x % 2 == 1) {
            return Err(Error::domain(format!(
                "{name} must contain positive even integers, found {bad}"
            )));
        }
    }
    let mut cu: Vec<u64> = sorted_distinct(u, "U")?;
    let mut ct: Vec<u64> = sorted_distinct(t, "T")?;
    if let Some(x) = cu.iter().find(|x| ct.binary_search(x).is_ok()) {
        return Err(Error::domain(format!("U and T share the element {x}")));
    }

    let mut lengths = vec![ell];
    let mut steps = Vec::new();
    let mut len = ell;
    for p in simple_sieve(2 * k).into_iter().filter(|&p| p > 2) {
        let mut counts = vec![0u64; p as usize];
        for &x in cu.iter().chain(ct.iter()) {
            counts[(x % p) as usize] += 1;
        }
        let class = (0..p).min_by_key(|&r| counts[r as usize]).unwrap_or(0);
        let occupied = counts[class as usize];
        let next = (len * (p - 2)).div_ceil(p);
        cu.retain(|&x| x % p != class);
        ct.retain(|&x| x % p != class);
        if (cu.len() as u64) < next || (ct.len() as u64) < next {
            return Err(Error::invariant(format!(
                "after removing class {class} mod {p} a set has fewer than {next} elements"
            )));
        }
        cu.truncate(next as usize);
        ct.truncate(next as usize);
        steps.push(SurfingStep {
            prime: p,
            removed_class: class,
            occupied,
            len_before: len,
            len_after: next,
        });
        len = next;
        lengths.push(len);
    }
    if len < k {
        return Err(Error::invariant(format!(
            "final length {len} is below k = {k}"
        )));
    }
    cu.truncate(k as usize);
    ct.truncate(k as usize);
    Ok(SurfingTrace {
        k,
        lengths,
        steps,
        x: cu,
        y: ct,
    })
}

fn sorted_distinct(set: &[u64], name: &str) -> Result<Vec<u64>> {
    let s: BTreeSet<u64> = set.iter().copied().collect();
    if s.len() != set.len() {
        return Err(Error::domain(format!("{name} contains repeated elements")));
    }
    Ok(s.into_iter().collect())
}
