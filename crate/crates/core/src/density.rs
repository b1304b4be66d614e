//! Difference graphs on the even numbers `2, 4, ..., 2N` and the counting
//! that goes with them.
//!
//! Two vertices are joined when their difference is *not* in a set `A` of
//! even integers, so the edges with difference `2d` number `N - d` or zero.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::{gap_counts, GapMode};
use crate::tuples::{is_admissible, surfing, SurfingTrace, Tuple};

pub const MAX_GRAPH_N: u64 = 10_000;
pub const MAX_EXACT_KTT_N: u64 = 1_000;
pub const MAX_EXACT_KTT_T: usize = 3;

pub const PROXY_LABEL: &str =
    "desk proxy: a difference counts as realised when it occurs at least `threshold` times below `limit`";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffGraph {
    pub n: u64,
    /// `edge[d]` for `d` in `0..n`: whether difference `2d` carries edges.
    /// `edge[0]` is always false.
    edge: Vec<bool>,
}

impl DiffGraph {
    /// Builds the graph, calling `in_a` once for each even difference
    /// `2, 4, ..., 2N - 2`.
    pub fn build(n: u64, mut in_a: impl FnMut(u64) -> bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("N must be at least 1"));
        }
        if n > MAX_GRAPH_N {
            return Err(Error::Resource {
                what: "difference graph vertices",
                requested: n,
                budget: MAX_GRAPH_N,
            });
        }
        let edge = (0..n).map(|d| d > 0 && !in_a(2 * d)).collect();
        Ok(Self { n, edge })
    }

    /// Vertices are `2, 4, ..., 2N`.
    pub fn vertices(&self) -> impl Iterator<Item = u64> {
        (1..=self.n).map(|i| 2 * i)
    }

    pub fn has_edge(&self, x: u64, y: u64) -> bool {
        let d = x.abs_diff(y) / 2;
        x % 2 == 0 && y % 2 == 0 && d < self.n && self.edge[d as usize]
    }

    pub fn degree(&self, x: u64) -> u64 {
        let i = x / 2;
        (1..self.n).filter(|&d| self.edge[d as usize]).map(|d| u64::from(i > d) + u64::from(i + d <= self.n)).sum()
    }

    /// Differences `2d` with `2d ∉ A`.
    pub fn edge_differences(&self) -> Vec<u64> {
        (1..self.n).filter(|&d| self.edge[d as usize]).map(|d| 2 * d).collect()
    }

    pub fn edge_count(&self) -> u64 {
        (1..self.n).filter(|&d| self.edge[d as usize]).map(|d| self.n - d).sum()
    }

    fn neighbours(&self, x: u64) -> Vec<u64> {
        let words = (self.n as usize).div_ceil(64);
        let mut bits = vec![0u64; words];
        for y in self.vertices() {
            if self.has_edge(x, y) {
                let i = (y / 2 - 1) as usize;
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        bits
    }
}

pub fn build_graph(n: u64, in_a: impl FnMut(u64) -> bool) -> Result<DiffGraph> {
    DiffGraph::build(n, in_a)
}

/// Edge counts keyed by difference, tallied pair by pair.
pub fn edge_count_by_difference(g: &DiffGraph) -> BTreeMap<u64, u64> {
    let mut out: BTreeMap<u64, u64> = (1..g.n.max(1)).map(|d| (2 * d, 0)).collect();
    for x in g.vertices() {
        for y in (x + 2..=2 * g.n).step_by(2) {
            if g.has_edge(x, y) {
                *out.get_mut(&(y - x)).expect("difference in range") += 1;
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KttSearch {
    pub t: usize,
    pub found: bool,
    /// Two disjoint `t`-sets with every cross pair an edge.
    pub witness: Option<(Vec<u64>, Vec<u64>)>,
    /// False when the search was heuristic; a negative answer is then not
    /// conclusive.
    pub exhaustive: bool,
}

/// Looks for a complete bipartite `K_{t,t}`. Exhaustive for `t <= 3` and
/// `N <= 1000`, otherwise a greedy search over high-degree vertices.
pub fn contains_ktt(g: &DiffGraph, t: usize) -> Result<KttSearch> {
    if t == 0 {
        return Err(Error::domain("t must be at least 1"));
    }
    let nbrs: Vec<Vec<u64>> = g.vertices().collect::<Vec<_>>().par_iter().map(|&x| g.neighbours(x)).collect();
    let mut order: Vec<usize> = (0..g.n as usize).filter(|&i| popcount(&nbrs[i]) >= t).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(popcount(&nbrs[i])), i));
    let exhaustive = t <= MAX_EXACT_KTT_T && g.n <= MAX_EXACT_KTT_N;
    let found = if exhaustive {
        (0..order.len()).into_par_iter().find_map_first(|a| {
            let mut chosen = vec![order[a]];
            extend(&nbrs, &order, a + 1, t, nbrs[order[a]].clone(), &mut chosen)
        })
    } else {
        greedy(&nbrs, &order, t)
    };
    let witness = found.map(|(u, common)| {
        let to_vertex = |i: usize| 2 * (i as u64 + 1);
        let mut left: Vec<u64> = u.into_iter().map(to_vertex).collect();
        left.sort_unstable();
        let right: Vec<u64> = ones(&common).take(t).map(to_vertex).collect();
        (left, right)
    });
    Ok(KttSearch {
        t,
        found: witness.is_some(),
        witness,
        exhaustive,
    })
}

fn extend(
    nbrs: &[Vec<u64>],
    order: &[usize],
    from: usize,
    t: usize,
    common: Vec<u64>,
    chosen: &mut Vec<usize>,
) -> Option<(Vec<usize>, Vec<u64>)> {
    if popcount(&common) < t {
        return None;
    }
    if chosen.len() == t {
        return Some((chosen.clone(), common));
    }
    for b in from..order.len() {
        let next: Vec<u64> = common.iter().zip(&nbrs[order[b]]).map(|(x, y)| x & y).collect();
        chosen.push(order[b]);
        if let Some(hit) = extend(nbrs, order, b + 1, t, next, chosen) {
            return Some(hit);
        }
        chosen.pop();
    }
    None
}

fn greedy(nbrs: &[Vec<u64>], order: &[usize], t: usize) -> Option<(Vec<usize>, Vec<u64>)> {
    let starts = order.len().min(64);
    (0..starts).find_map(|s| {
        let mut chosen = vec![order[s]];
        let mut common = nbrs[order[s]].clone();
        while chosen.len() < t {
            let best = order
                .iter()
                .filter(|i| !chosen.contains(i))
                .map(|&i| {
                    let c: Vec<u64> = common.iter().zip(&nbrs[i]).map(|(x, y)| x & y).collect();
                    (popcount(&c), i, c)
                })
                .max_by_key(|(p, i, _)| (*p, std::cmp::Reverse(*i)))?;
            if best.0 < t {
                return None;
            }
            chosen.push(best.1);
            common = best.2;
        }
        Some((chosen, common))
    })
}

fn popcount(bits: &[u64]) -> usize {
    bits.iter().map(|w| w.count_ones() as usize).sum()
}

fn ones(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(j, &w)| (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| 64 * j + b))
}

/// `c t^{1/t} n^{2 - 1/t}`, without the linear term.
pub fn kst_bound(n: u64, t: u64, c: f64) -> Result<f64> {
    if n == 0 || t == 0 || !(c > 0.0) {
        return Err(Error::domain("kst_bound needs n >= 1, t >= 1, c > 0"));
    }
    let (n, t) = (n as f64, t as f64);
    Ok(c * t.powf(1.0 / t) * n.powf(2.0 - 1.0 / t))
}

/// Largest `t` with `t (t + 1) / 2 <= edges`.
pub fn coverage_bound(edges: u64) -> u64 {
    let mut t = (((8.0 * edges as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while t * (t + 1) / 2 > edges {
        t -= 1;
    }
    while (t + 1) * (t + 2) / 2 <= edges {
        t += 1;
    }
    t
}

/// `1 - 1/(2ℓ)`, the exponent attached to `ℓ`-sized surfing sets.
pub fn reference_kappa(ell: u64) -> f64 {
    1.0 - 1.0 / (2.0 * ell as f64)
}

pub const KAPPAS: [f64; 5] = [0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaPoint {
    pub m: u64,
    pub exceptions: u64,
    pub power: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaCurve {
    pub kappa: f64,
    pub points: Vec<KappaPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolignacReport {
    pub label: &'static str,
    pub limit: u64,
    pub threshold: u64,
    pub max_diff: u64,
    /// Even `m <= max_diff` occurring fewer than `threshold` times.
    pub exceptions: Vec<u64>,
    pub twin_count: u64,
    pub kappa_curves: Vec<KappaCurve>,
}

/// Classifies each even `m <= max_diff` by how often it occurs as a
/// difference of primes up to `limit`.
pub fn empirical_polignac_density(limit: u64, threshold: u64, max_diff: u64) -> Result<PolignacReport> {
    if max_diff < 2 {
        return Err(Error::domain("max_diff must be at least 2"));
    }
    let counts = gap_counts(limit, max_diff, GapMode::AllPairs)?;
    let exceptions: Vec<u64> = counts
        .iter()
        .filter(|(&m, &c)| m % 2 == 0 && c < threshold)
        .map(|(&m, _)| m)
        .collect();
    let mut checkpoints: Vec<u64> = std::iter::successors(Some(10u64), |&m| m.checked_mul(10))
        .take_while(|&m| m < max_diff)
        .collect();
    checkpoints.push(max_diff);
    let kappa_curves = KAPPAS
        .iter()
        .map(|&kappa| KappaCurve {
            kappa,
            points: checkpoints
                .iter()
                .map(|&m| {
                    let e = exceptions.partition_point(|&x| x <= m) as u64;
                    let power = (m as f64).powf(kappa);
                    KappaPoint {
                        m,
                        exceptions: e,
                        power,
                        within: e as f64 <= power,
                    }
                })
                .collect(),
        })
        .collect();
    Ok(PolignacReport {
        label: PROXY_LABEL,
        limit,
        threshold,
        max_diff,
        exceptions,
        twin_count: counts[&2],
        kappa_curves,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossProductCertificate {
    pub trace: SurfingTrace,
    pub admissible: bool,
    /// Pairs `(x, y)` in `X × Y` whose difference lies in `A`.
    pub a_pairs: Vec<(u64, u64)>,
}

impl CrossProductCertificate {
    /// An admissible union with no `A`-pair across: the instance refutes the
    /// cross-product property for the complement of `A`.
    pub fn is_counterexample(&self) -> bool {
        self.admissible && self.a_pairs.is_empty()
    }
}

/// Runs the surfing reduction on `U`, `T` and checks the resulting pair of
/// sets. Requires that no pair across `U × T` is an `A`-pair.
pub fn cross_product_certificate(
    u: &[u64],
    t: &[u64],
    k: u64,
    in_a: impl Fn(u64) -> bool,
) -> Result<CrossProductCertificate> {
    if let Some((x, y)) = u
        .iter()
        .flat_map(|&x| t.iter().map(move |&y| (x, y)))
        .find(|&(x, y)| in_a(x.abs_diff(y)))
    {
        return Err(Error::domain(format!("{x} and {y} form an A-pair across U and T")));
    }
    let trace = surfing(u, t, k)?;
    let union: Vec<i64> = trace.x.iter().chain(&trace.y).map(|&v| v as i64).collect();
    let admissible = is_admissible(&Tuple::from_unsorted(union)?).admissible;
    let a_pairs = trace
        .x
        .iter()
        .flat_map(|&x| trace.y.iter().map(move |&y| (x, y)))
        .filter(|&(x, y)| in_a(x.abs_diff(y)))
        .collect();
    Ok(CrossProductCertificate {
        trace,
        admissible,
        a_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graphs() {
        let all = build_graph(10, |_| true).unwrap();
        assert_eq!(all.edge_count(), 0);
        let none = build_graph(10, |_| false).unwrap();
        assert_eq!(none.edge_count(), 45);
        let two = build_graph(10, |m| m == 2).unwrap();
        assert_eq!(two.edge_count(), 36);
        let by = edge_count_by_difference(&none);
        assert_eq!(by[&2], 9);
        assert_eq!(by[&18], 1);
        assert_eq!(by.get(&20), None);
        assert!(build_graph(MAX_GRAPH_N + 1, |_| false).is_err());
    }

    #[test]
    fn degrees_match_neighbours() {
        let g = build_graph(30, |m| m % 6 == 0).unwrap();
        for x in g.vertices() {
            let direct = g.vertices().filter(|&y| g.has_edge(x, y)).count() as u64;
            assert_eq!(g.degree(x), direct);
        }
    }

    #[test]
    fn ktt_examples() {
        let complete = build_graph(10, |_| false).unwrap();
        let r = contains_ktt(&complete, 2).unwrap();
        assert!(r.found && r.exhaustive);
        let (u, t) = r.witness.unwrap();
        for &x in &u {
            for &y in &t {
                assert!(complete.has_edge(x, y));
            }
        }
        let empty = build_graph(10, |_| true).unwrap();
        for t in 1..=3 {
            assert!(!contains_ktt(&empty, t).unwrap().found);
        }
        let path = build_graph(20, |m| m != 2).unwrap();
        assert!(!contains_ktt(&path, 2).unwrap().found);
        assert!(contains_ktt(&path, 1).unwrap().found);
    }

    #[test]
    fn heuristic_is_flagged() {
        let g = build_graph(40, |_| false).unwrap();
        let r = contains_ktt(&g, 5).unwrap();
        assert!(!r.exhaustive);
        assert!(r.found);
    }

    #[test]
    fn bounds() {
        assert_eq!(kst_bound(100, 1, 1.0).unwrap(), 100.0);
        assert!((kst_bound(100, 2, 1.0).unwrap() - 1414.213562373095).abs() < 1e-9);
        assert_eq!(kst_bound(100, 2, 2.0).unwrap(), 2.0 * kst_bound(100, 2, 1.0).unwrap());
        assert!(kst_bound(0, 2, 1.0).is_err());
        assert_eq!(coverage_bound(0), 0);
        assert_eq!(coverage_bound(3), 2);
        assert_eq!(coverage_bound(10), 4);
        assert_eq!(coverage_bound(9), 3);
        assert_eq!(reference_kappa(1), 0.5);
    }

    #[test]
    fn polignac_extremes() {
        let r = empirical_polignac_density(10_000, u64::MAX, 100).unwrap();
        assert_eq!(r.exceptions.len(), 50);
        let r = empirical_polignac_density(10_000, 1, 100).unwrap();
        assert!(r.exceptions.is_empty());
        assert_eq!(r.twin_count, 205);
        assert_eq!(r.kappa_curves.len(), KAPPAS.len());
    }
}
