use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use super::closed::tail_bounds;
use super::params::GParams;
use crate::error::{Error, Result};

const DEFAULT_CELLS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimizerRatio {
    /// `I'/I` including the `(1 - Σ t)^{-2}` weight. Here `I` is the
    /// integral of `(∏_{i>=2} g(k t_i)²) (∫ g(k t) dt)²`, the same quantity
    /// as `J_k` for the product profile.
    pub ratio: f64,
    /// The same quotient without the weight.
    pub unweighted: f64,
    /// `(∫g)² / (k ν)`.
    pub main: f64,
    /// `E[(1 - Y)^{-2}; Y <= τ]` for `Y = Σ_{i=2}^{k-1} t_i`.
    pub weighted_mass: f64,
    /// `P(Y <= τ)`.
    pub mass_within_tau: f64,
    pub grid_cells: usize,
}

pub fn constrained_minimizer_ratio(params: &GParams) -> Result<MinimizerRatio> {
    constrained_minimizer_ratio_with(params, DEFAULT_CELLS)
}

/// Evaluates `I'/I` for the product profile.
///
/// After integrating out the two boundary coordinates, the quotient reduces
/// to `(∫g)²/(kν) · E[(1 - Y)^{-2}; Y <= τ]`, where `Y` is the sum of `k - 2`
/// independent copies of `x/k` with `x` distributed as `g²/ν`. The law of `Y`
/// on `[0, τ]` is computed on a grid by repeated FFT convolution of a
/// mass- and mean-preserving discretisation of one summand. Mass beyond `τ`
/// can be discarded at every stage because all summands are nonnegative.
pub fn constrained_minimizer_ratio_with(params: &GParams, cells: usize) -> Result<MinimizerRatio> {
    params.validate()?;
    tail_bounds(params)?;
    if cells < 16 {
        return Err(Error::domain("grid needs at least 16 cells"));
    }
    let shape = params.shape();
    let kf = params.kf();
    let main = shape.int_g().powi(2) / (kf * shape.nu());
    let n = params.k - 2;
    let tau = params.tau;
    let h = tau / cells as f64;

    let law = if n == 0 {
        let mut delta = vec![0.0; cells + 1];
        delta[0] = 1.0;
        delta
    } else {
        let base = binned_summand(params, cells, h);
        let mut conv = Convolver::new(cells + 1);
        conv.power(&base, n)
    };

    let mut weighted = 0.0;
    let mut within = 0.0;
    for (j, &p) in law.iter().enumerate() {
        let y = j as f64 * h;
        weighted += p / (1.0 - y).powi(2);
        within += p;
    }
    if !(weighted.is_finite() && within > 0.0) {
        return Err(Error::invariant(format!(
            "degenerate law of the interior sum (mass {within})"
        )));
    }
    Ok(MinimizerRatio {
        ratio: main * weighted,
        unweighted: main * within,
        main,
        weighted_mass: weighted,
        mass_within_tau: within,
        grid_cells: cells,
    })
}

/// Linear binning of the law of `x/k` onto the nodes `j h`.
fn binned_summand(params: &GParams, cells: usize, h: f64) -> Vec<f64> {
    let (l, a, kf) = (params.l, params.a, params.kf());
    let nu = params.shape().nu();
    let top = (params.t / kf).min(params.tau);
    let z = |y: f64| l + a * kf * y;
    let mut out = vec![0.0; cells + 1];
    for j in 0..cells {
        let ya = j as f64 * h;
        if ya >= top {
            break;
        }
        let yb = ((j + 1) as f64 * h).min(top);
        let (za, zb) = (z(ya), z(yb));
        // mass = (1/(νA)) (1/za - 1/zb)
        let mass = (zb - za) / (za * zb) / (nu * a);
        // ∫ (y - ya) dP = (1/(νA²k)) [ln(1 + d) - d/(1 + d)], d = (zb - za)/za
        let offset = cell_moment((zb - za) / za) / (nu * a * a * kf);
        let right = (offset / h).clamp(0.0, mass);
        out[j] += mass - right;
        out[j + 1] += right;
    }
    out
}

/// `ln(1 + d) - d/(1 + d)`, by its series when `d` is small.
fn cell_moment(d: f64) -> f64 {
    if d < 1e-2 {
        let mut term = d;
        let mut acc = 0.0;
        for n in 2..=10 {
            term *= -d;
            acc -= (n - 1) as f64 / n as f64 * term;
        }
        acc
    } else {
        d.ln_1p() - d / (1.0 + d)
    }
}

struct Convolver {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    fft_len: usize,
}

impl Convolver {
    fn new(len: usize) -> Self {
        let fft_len = (2 * len).next_power_of_two();
        let mut planner = FftPlanner::new();
        Self {
            len,
            forward: planner.plan_fft_forward(fft_len),
            inverse: planner.plan_fft_inverse(fft_len),
            fft_len,
        }
    }

    fn spectrum(&self, a: &[f64]) -> Vec<Complex<f64>> {
        let mut buf: Vec<Complex<f64>> = a.iter().map(|&x| Complex::new(x, 0.0)).collect();
        buf.resize(self.fft_len, Complex::new(0.0, 0.0));
        self.forward.process(&mut buf);
        buf
    }

    fn multiply(&self, fa: &[Complex<f64>], fb: &[Complex<f64>]) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = fa.iter().zip(fb).map(|(x, y)| x * y).collect();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.fft_len as f64;
        buf[..self.len].iter().map(|c| (c.re * scale).max(0.0)).collect()
    }

    fn convolve(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let fa = self.spectrum(a);
        let fb = self.spectrum(b);
        self.multiply(&fa, &fb)
    }

    fn square(&self, a: &[f64]) -> Vec<f64> {
        let fa = self.spectrum(a);
        self.multiply(&fa, &fa)
    }

    /// `n`-fold convolution power truncated to `len` entries.
    fn power(&mut self, base: &[f64], mut n: u64) -> Vec<f64> {
        let mut acc: Option<Vec<f64>> = None;
        let mut sq = base.to_vec();
        loop {
            if n & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => self.convolve(&a, &sq),
                });
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            sq = self.square(&sq);
        }
        acc.expect("n >= 1")
    }
}
