use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::primes::{gcd, mobius, PrimeTable};
use crate::variational::{SimplexProfile, QUAD_ORDER};

const KEY_BITS: u32 = 20;
const MAX_KEY_ENTRIES: usize = 6;
const MAX_TABLE_ENTRIES: usize = 4_000_000;
/// Rough cap on quadrature nodes spent filling the table.
const MAX_TABLE_NODES: f64 = 5e10;

/// A linear form `sign * n + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Form {
    pub sign: i64,
    pub shift: i64,
}

impl Form {
    pub fn eval(&self, n: u64) -> i64 {
        self.sign * n as i64 + self.shift
    }
}

/// Sorted nontrivial entries of a divisor tuple packed into one integer.
fn pack(entries: &mut [u32]) -> u128 {
    entries.sort_unstable();
    entries
        .iter()
        .enumerate()
        .fold(0u128, |acc, (i, &d)| acc | (d as u128) << (KEY_BITS * i as u32))
}

/// Values of `f(log d_1/log R, ..., log d_m/log R)` for every multiset of
/// squarefree `W`-coprime `d_i > 1` with product at most `R`.
#[derive(Debug, Clone)]
pub(crate) struct LambdaTable {
    values: HashMap<u128, f64>,
    pub origin: f64,
}

impl LambdaTable {
    pub fn build(profile: &SimplexProfile, r: u64, w: u64) -> Result<Self> {
        let dims = profile.k;
        let eligible: Vec<u32> = (2..=r)
            .filter(|&d| gcd(d, w) == 1 && mobius(d) != 0)
            .map(|d| d as u32)
            .collect();
        if let Some(&smallest) = eligible.first() {
            let deepest = (smallest as u64).checked_pow(MAX_KEY_ENTRIES as u32 + 1);
            if dims > MAX_KEY_ENTRIES && deepest.is_some_and(|p| p <= r) {
                return Err(Error::domain(format!(
                    "divisor tuples with more than {MAX_KEY_ENTRIES} nontrivial entries fit under R = {r}; \
                     use a larger W or a smaller R"
                )));
            }
        }
        let mut keys: Vec<Vec<u32>> = vec![Vec::new()];
        let mut stack = Vec::new();
        collect_multisets(&eligible, 0, 1, r, dims, &mut stack, &mut keys)?;
        let binding = profile.shape.t > profile.tau;
        let nodes = keys.len() as f64 * if binding { (QUAD_ORDER as f64).powi(dims as i32 - 1) } else { 1.0 };
        if nodes > MAX_TABLE_NODES {
            return Err(Error::Resource {
                what: "quadrature nodes for the sieve coefficient table",
                requested: nodes as u64,
                budget: MAX_TABLE_NODES as u64,
            });
        }
        let log_r = (r as f64).ln();
        let values: Vec<(u128, f64)> = keys
            .into_par_iter()
            .map(|mut entries| {
                let mut t = vec![0.0; dims];
                for (ti, &d) in t.iter_mut().zip(&entries) {
                    *ti = (d as f64).ln() / log_r;
                }
                let v = profile.f_value(&t);
                (pack(&mut entries), v)
            })
            .collect();
        let values: HashMap<u128, f64> = values.into_iter().collect();
        let origin = values[&0];
        Ok(Self { values, origin })
    }

    /// Looks up `f` for the nontrivial entries of a divisor tuple.
    #[inline]
    pub fn get(&self, entries: &mut [u32]) -> f64 {
        if entries.is_empty() {
            return self.origin;
        }
        self.values.get(&pack(entries)).copied().unwrap_or(0.0)
    }
}

fn collect_multisets(
    eligible: &[u32],
    start: usize,
    prod: u64,
    r: u64,
    slots: usize,
    stack: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) -> Result<()> {
    if stack.len() == slots.min(MAX_KEY_ENTRIES) {
        return Ok(());
    }
    for (i, &d) in eligible.iter().enumerate().skip(start) {
        let p = prod * d as u64;
        if p > r {
            break;
        }
        stack.push(d);
        out.push(stack.clone());
        if out.len() > MAX_TABLE_ENTRIES {
            return Err(Error::Resource {
                what: "sieve coefficient table entries",
                requested: out.len() as u64,
                budget: MAX_TABLE_ENTRIES as u64,
            });
        }
        collect_multisets(eligible, i, p, r, slots, stack, out)?;
        stack.pop();
    }
    Ok(())
}

/// Squarefree divisors `d <= R` of `v` with no prime factor dividing `W`,
/// together with `μ(d)`, sorted by `d`.
pub(crate) fn sieve_divisors(
    table: &PrimeTable,
    v: u64,
    r: u64,
    w: u64,
    primes_buf: &mut Vec<u64>,
    out: &mut Vec<(u64, i8)>,
) {
    table.distinct_factors(v, primes_buf);
    out.clear();
    out.push((1, 1));
    for &p in primes_buf.iter() {
        if w % p == 0 || p > r {
            continue;
        }
        let len = out.len();
        for i in 0..len {
            let (d, mu) = out[i];
            if d * p <= r {
                out.push((d * p, -mu));
            }
        }
    }
    out.sort_unstable_by_key(|&(d, _)| d);
}

/// Sum of `λ_d` over divisor tuples `d_i | v_i` with the support rules
/// applied, by depth-first search in a fixed order.
pub(crate) struct WeightWalker<'a> {
    pub r: u64,
    pub lambda: &'a LambdaTable,
    /// Optional second table used unless the coordinates `(i, j)` are both 1.
    pub alt: Option<(&'a LambdaTable, usize, usize)>,
}

impl WeightWalker<'_> {
    pub fn sum(&self, divisors: &[Vec<(u64, i8)>]) -> f64 {
        let mut chosen = vec![1u64; divisors.len()];
        let mut acc = 0.0;
        self.walk(divisors, 0, 1, 1, &mut chosen, &mut acc);
        acc
    }

    fn walk(
        &self,
        divisors: &[Vec<(u64, i8)>],
        i: usize,
        prod: u64,
        sign: i8,
        chosen: &mut [u64],
        acc: &mut f64,
    ) {
        if i == divisors.len() {
            let mut entries = [0u32; MAX_KEY_ENTRIES];
            let mut m = 0;
            for &d in chosen.iter() {
                if d > 1 {
                    entries[m] = d as u32;
                    m += 1;
                }
            }
            let table = match self.alt {
                Some((alt, a, b)) if chosen[a] != 1 || chosen[b] != 1 => alt,
                _ => self.lambda,
            };
            *acc += f64::from(sign) * table.get(&mut entries[..m]);
            return;
        }
        for &(d, mu) in &divisors[i] {
            let p = prod * d;
            if p > self.r {
                break;
            }
            chosen[i] = d;
            self.walk(divisors, i + 1, p, sign * mu, chosen, acc);
        }
        chosen[i] = 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_lists() {
        let table = PrimeTable::up_to(10_000, true).unwrap();
        let mut buf = Vec::new();
        let mut out = Vec::new();
        // 11 * 13 * 2 * 9 = 2574
        sieve_divisors(&table, 2574, 200, 210, &mut buf, &mut out);
        assert_eq!(out, vec![(1, 1), (11, -1), (13, -1), (143, 1)]);
        sieve_divisors(&table, 2574, 100, 210, &mut buf, &mut out);
        assert_eq!(out, vec![(1, 1), (11, -1), (13, -1)]);
    }

    #[test]
    fn too_many_entries_is_an_error() {
        use crate::variational::GShape;
        let shape = GShape::new(1.05, 1.0, 8.0 / 1.05).unwrap();
        let profile = SimplexProfile::new(shape, 8, 1.0 / 1.05).unwrap();
        // 3^7 = 2187 <= R with W = 2
        let err = LambdaTable::build(&profile, 3000, 2).unwrap_err();
        assert!(err.to_string().contains("nontrivial entries"), "{err}");
        let err = LambdaTable::build(&profile, 3000, 210).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }), "{err}");
    }

    #[test]
    fn keys_are_order_free() {
        assert_eq!(pack(&mut [13, 11]), pack(&mut [11, 13]));
        assert_ne!(pack(&mut [11]), pack(&mut [11, 11]));
    }
}
