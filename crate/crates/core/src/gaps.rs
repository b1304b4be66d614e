//! Partitioned tuples, per-cell prime counts and subsequences of a
//! `β`-sequence whose steps look like normalized prime gaps.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::tolerant_ceil;
use crate::primes::{normalized_gaps, PrimeTable};
use crate::sieve::SieveEngine;
use crate::tuples::Tuple;

pub const GAP_SET_LABEL: &str =
    "proxy: limit points are approximated by the normalized gaps below `gap_limit`, within `tol`";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellPartition {
    pub tuple: Tuple,
    pub theta: f64,
    pub a: u64,
    pub m: u64,
    pub cells: Vec<Tuple>,
}

impl CellPartition {
    pub fn cell_size(&self) -> usize {
        self.cells[0].k()
    }
}

/// Splits the sorted offsets into `a m + 1` contiguous blocks of equal size,
/// `a = ⌈2/θ⌉`.
pub fn partition_tuple(h: &Tuple, theta: f64, m: u64) -> Result<CellPartition> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::domain(format!("θ must lie in (0, 1], got {theta}")));
    }
    if m == 0 {
        return Err(Error::domain("m must be at least 1"));
    }
    let a = tolerant_ceil(2.0 / theta) as u64;
    let cells = (a * m + 1) as usize;
    let k = h.k();
    if k % cells != 0 {
        let below = k / cells * cells;
        let above = below + cells;
        let nearest = if below == 0 || above - k <= k - below { above } else { below };
        return Err(Error::domain(format!(
            "k = {k} is not divisible by a m + 1 = {cells}; nearest valid k is {nearest}"
        )));
    }
    let size = k / cells;
    let cells = h
        .offsets()
        .chunks(size)
        .map(|c| Tuple::new(c.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(CellPartition {
        tuple: h.clone(),
        theta,
        a,
        m,
        cells,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellCounts {
    pub n: u64,
    pub y: Vec<u32>,
    /// Cells with at least one prime.
    pub positive: usize,
    /// Cells with exactly one prime.
    pub singletons: usize,
}

/// `Y_j(n)`, the number of primes among `n + h` for `h` in cell `j`.
pub fn cell_prime_counts(part: &CellPartition, n: u64, table: &PrimeTable) -> Result<CellCounts> {
    let mut y = Vec::with_capacity(part.cells.len());
    for cell in &part.cells {
        let mut c = 0;
        for &h in cell.offsets() {
            let v = n as i64 + h;
            if v < 0 || !table.contains(v as u64) {
                return Err(Error::domain(format!(
                    "n + h = {v} lies outside the prime table [{}, {})",
                    table.lo(),
                    table.hi()
                )));
            }
            c += u32::from(table.is_prime(v as u64));
        }
        y.push(c);
    }
    Ok(CellCounts {
        n,
        positive: y.iter().filter(|&&c| c > 0).count(),
        singletons: y.iter().filter(|&&c| c == 1).count(),
        y,
    })
}

/// Every `n` in `[lo, hi]` (optionally with `n ≡ b0 mod W`) having at least
/// `min_singletons` cells with exactly one prime, in increasing order.
pub fn scan_singleton_cells(
    part: &CellPartition,
    lo: u64,
    hi: u64,
    min_singletons: usize,
    class: Option<(u64, u64)>,
    table: &PrimeTable,
) -> Result<Vec<CellCounts>> {
    if hi < lo || min_singletons > part.cells.len() {
        return Ok(Vec::new());
    }
    cell_prime_counts(part, lo, table)?;
    cell_prime_counts(part, hi, table)?;
    let (start, step) = match class {
        Some((b0, w)) if w > 0 => (lo + (b0 % w + w - lo % w) % w, w),
        Some(_) => return Err(Error::domain("modulus must be positive")),
        None => (lo, 1),
    };
    if start > hi {
        return Ok(Vec::new());
    }
    let count = (hi - start) / step + 1;
    const CHUNK: u64 = 4096;
    let parts: Vec<Vec<CellCounts>> = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            (c * CHUNK..((c + 1) * CHUNK).min(count))
                .map(|i| cell_prime_counts(part, start + i * step, table).expect("range checked"))
                .filter(|cc| cc.singletons >= min_singletons)
                .collect()
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

/// `Σ w(n)²` over `n ≡ b0 (mod W)` in `[lo, hi]` with at least
/// `min_singletons` singleton cells, using the standard sieve weight in
/// place of the cell-structured one.
pub fn weighted_singleton_mass(
    engine: &SieveEngine,
    part: &CellPartition,
    lo: u64,
    hi: u64,
    min_singletons: usize,
) -> Result<(f64, f64)> {
    let cfg = engine.config();
    if cfg.tuple != part.tuple {
        return Err(Error::domain("partition and sieve use different tuples"));
    }
    let hits = scan_singleton_cells(part, lo, hi, min_singletons, Some((cfg.b0, cfg.w)), engine.primes())?;
    let mut hit_mass = crate::numeric::NeumaierSum::new();
    for h in &hits {
        hit_mass.add(engine.weight(h.n)?.powi(2));
    }
    let total = engine
        .moment_sums(crate::sieve::MomentRange::Custom { lo, hi }, 1)?
        .sum_w2;
    Ok((hit_mass.value(), total))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaSequence {
    values: Vec<f64>,
}

impl BetaSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("β sequence is empty"));
        }
        if values.iter().any(|&b| !(b >= 0.0 && b.is_finite())) {
            return Err(Error::domain("β values must be finite and nonnegative"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("β values must be strictly increasing"));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaResult {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    pub length: usize,
    pub min_len: usize,
    pub found: bool,
}

/// Longest subsequence of `betas` whose consecutive steps each lie within
/// `tol` of a value in `gap_set`. `tol = ∞` accepts every step.
pub fn beta_subsequence_check(betas: &BetaSequence, gap_set: &[f64], tol: f64, min_len: usize) -> Result<BetaResult> {
    if !(tol > 0.0) {
        return Err(Error::domain("tol must be positive"));
    }
    let mut gaps: Vec<f64> = gap_set.iter().copied().filter(|g| g.is_finite()).collect();
    gaps.sort_by(f64::total_cmp);
    let ok = |d: f64| {
        if tol.is_infinite() {
            return true;
        }
        let i = gaps.partition_point(|&g| g < d);
        let near = |j: usize| gaps.get(j).is_some_and(|&g| (g - d).abs() <= tol);
        near(i) || (i > 0 && near(i - 1))
    };
    let b = betas.values();
    let mut best = vec![1usize; b.len()];
    let mut prev = vec![usize::MAX; b.len()];
    for j in 0..b.len() {
        for i in 0..j {
            if best[i] + 1 > best[j] && ok(b[j] - b[i]) {
                best[j] = best[i] + 1;
                prev[j] = i;
            }
        }
    }
    let mut end = 0;
    for j in 0..b.len() {
        if best[j] > best[end] {
            end = j;
        }
    }
    let mut indices = vec![end];
    while prev[*indices.last().unwrap()] != usize::MAX {
        indices.push(prev[*indices.last().unwrap()]);
    }
    indices.reverse();
    let length = indices.len();
    Ok(BetaResult {
        values: indices.iter().map(|&i| b[i]).collect(),
        indices,
        length,
        min_len,
        found: length >= min_len,
    })
}

/// Distinct normalized gaps `(p_{n+1} - p_n)/ln p_n` for primes up to
/// `limit`, sorted.
pub fn gap_value_set(limit: u64) -> Result<Vec<f64>> {
    let mut v: Vec<f64> = normalized_gaps(limit)?.entries.iter().map(|e| e.normalized).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[i64]) -> Tuple {
        Tuple::new(v.to_vec()).unwrap()
    }

    #[test]
    fn partition_arithmetic() {
        let p = partition_tuple(&t(&(0..10).map(|i| 2 * i).collect::<Vec<_>>()), 0.5, 1).unwrap();
        assert_eq!(p.a, 4);
        assert_eq!(p.cells.len(), 5);
        assert_eq!(p.cell_size(), 2);
        let p = partition_tuple(&t(&[0, 2, 6]), 1.0, 1).unwrap();
        assert_eq!(p.a, 2);
        assert_eq!(p.cells.len(), 3);
        let err = partition_tuple(&t(&[0, 2, 6, 8]), 1.0, 1).unwrap_err();
        assert!(err.to_string().contains("nearest valid k is 3"), "{err}");
    }

    #[test]
    fn counts_per_cell() {
        let table = PrimeTable::up_to(1000, false).unwrap();
        let part = partition_tuple(&t(&[0, 2, 6, 8, 12, 14]), 1.0, 1).unwrap();
        let c = cell_prime_counts(&part, 5, &table).unwrap();
        // 5, 7, 11, 13, 17, 19
        assert_eq!(c.y, vec![2, 2, 2]);
        assert_eq!(c.singletons, 0);
        // 3, 5 | 9, 11 | 15, 17
        let c = cell_prime_counts(&part, 3, &table).unwrap();
        assert_eq!(c.y, vec![2, 1, 1]);
        assert_eq!((c.positive, c.singletons), (3, 2));
        let c = cell_prime_counts(&part, 200, &table).unwrap();
        assert_eq!(c.y, vec![0, 0, 0]);
        assert!(cell_prime_counts(&part, 990, &table).is_err());
    }

    #[test]
    fn singleton_scan_finds_twins() {
        let table = PrimeTable::up_to(2000, false).unwrap();
        let part = partition_tuple(&t(&[0, 2, 4]), 1.0, 1).unwrap();
        assert_eq!(scan_singleton_cells(&part, 1, 100, 0, None, &table).unwrap().len(), 100);
        assert!(scan_singleton_cells(&part, 1, 100, 4, None, &table).unwrap().is_empty());
    }

    #[test]
    fn beta_examples() {
        let b = BetaSequence::new(vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(beta_subsequence_check(&b, &[1.0], 1e-9, 3).unwrap().length, 3);
        assert_eq!(beta_subsequence_check(&b, &[], 1e-9, 1).unwrap().length, 1);
        let b = BetaSequence::new(vec![0.0, 0.5, 1.7]).unwrap();
        let r = beta_subsequence_check(&b, &[0.5, 1.2], 1e-6, 3).unwrap();
        assert_eq!(r.indices, vec![0, 1, 2]);
        assert!(r.found);
        assert!(BetaSequence::new(vec![1.0, 1.0]).is_err());
        assert!(beta_subsequence_check(&b, &[], 0.0, 1).is_err());
    }
}
