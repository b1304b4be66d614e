//! Small numerical utilities shared across modules.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use serde::Serialize;

/// Neumaier's variant of compensated summation.
///
/// Partial sums can be merged, so a reduction over fixed chunks is
/// independent of how the chunks were scheduled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Formats `x` with `digits` significant digits, trimming trailing zeros.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        let s = format!("{:.*e}", digits - 1, x);
        return trim_mantissa(&s);
    }
    let shift = digits as i32 - 1 - exp;
    if shift < 0 {
        let scale = 10f64.powi(-shift);
        return format!("{:.0}", (x / scale).round() * scale);
    }
    let s = format!("{:.*}", shift as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn trim_mantissa(s: &str) -> String {
    match s.split_once('e') {
        Some((m, e)) if m.contains('.') => {
            format!("{}e{}", m.trim_end_matches('0').trim_end_matches('.'), e)
        }
        _ => s.to_string(),
    }
}

/// Ceiling that treats values within a relative `1e-9` of an integer as that
/// integer, so that `ceil(2 / 0.5)` is 4 rather than 5.
pub fn tolerant_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Shared Gauss-Legendre rules of a few fixed orders.
pub fn gauss_legendre(order: usize) -> &'static GaussLegendre {
    static RULES: OnceLock<Vec<GaussLegendre>> = OnceLock::new();
    let rules = RULES.get_or_init(|| {
        ORDERS
            .iter()
            .map(|&n| GaussLegendre::new(NonZeroUsize::new(n).expect("nonzero order")))
            .collect()
    });
    let idx = ORDERS
        .iter()
        .position(|&n| n >= order)
        .unwrap_or(ORDERS.len() - 1);
    &rules[idx]
}

const ORDERS: [usize; 6] = [8, 16, 24, 32, 48, 64];

/// `ln((a + b) / a)` for `a > 0`, accurate when `b / a` is small.
#[inline]
pub fn log_ratio(a: f64, b: f64) -> f64 {
    (b / a).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let s: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn neumaier_merge_matches_single_pass() {
        let xs: Vec<f64> = (1..2000).map(|i| 1.0 / i as f64).collect();
        let whole: NeumaierSum = xs.iter().copied().collect();
        let mut merged = NeumaierSum::new();
        for chunk in xs.chunks(37) {
            let part: NeumaierSum = chunk.iter().copied().collect();
            merged.merge(&part);
        }
        assert!((whole.value() - merged.value()).abs() < 1e-15);
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(0.5, 12), "0.5");
        assert_eq!(fmt_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(fmt_sig(2.0, 12), "2");
        assert_eq!(fmt_sig(123456.789, 4), "123500");
        assert_eq!(fmt_sig(1.5e-9, 3), "1.5e-9");
    }

    #[test]
    fn tolerant_ceiling() {
        assert_eq!(tolerant_ceil(2.0 / 0.5), 4.0);
        assert_eq!(tolerant_ceil(4.000000000001), 4.0);
        assert_eq!(tolerant_ceil(4.1), 5.0);
    }

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let q = gauss_legendre(16);
        let v = q.integrate(0.0, 2.0, |x| x.powi(7));
        assert!((v - 32.0).abs() < 1e-12);
    }
}
