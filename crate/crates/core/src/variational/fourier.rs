//! One-dimensional check of the Fourier kernel identity
//!
//! ```text
//! ∫∫ (1+iξ)(1+iξ')/(2+iξ+iξ') ĝ(ξ) ĝ(ξ') dξ dξ' = ∫_0^∞ f'(t)² dt,
//! ĝ(ξ) = (1/2π) ∫ e^{(1+iξ) t} f(t) dt.
//! ```
//!
//! The left side is a two-dimensional trapezoid sum over a truncated `ξ`
//! grid; the right side is adaptive quadrature in `t`. Each test function has
//! a closed-form transform.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use quadrature::double_exponential;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    /// `a exp(-(t - μ)² / 2s²)`.
    Gaussian { amplitude: f64, mu: f64, s: f64 },
    /// `a (1 - t)² 1_[0,1]` convolved with a centred Gaussian of width `s`.
    MollifiedQuadratic { amplitude: f64, s: f64 },
    /// `a t³ e^{-5t} 1_{t >= 0}`.
    CubicExponential { amplitude: f64 },
}

impl TestFunction {
    pub fn defaults() -> [TestFunction; 3] {
        [
            TestFunction::Gaussian {
                amplitude: 1.0,
                mu: 0.5,
                s: 0.15,
            },
            TestFunction::MollifiedQuadratic {
                amplitude: 1.0,
                s: 0.05,
            },
            TestFunction::CubicExponential { amplitude: 50.0 },
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::Gaussian { .. } => "gaussian",
            TestFunction::MollifiedQuadratic { .. } => "mollified-quadratic",
            TestFunction::CubicExponential { .. } => "cubic-exponential",
        }
    }

    pub fn scaled(&self, c: f64) -> TestFunction {
        match *self {
            TestFunction::Gaussian { amplitude, mu, s } => TestFunction::Gaussian {
                amplitude: amplitude * c,
                mu,
                s,
            },
            TestFunction::MollifiedQuadratic { amplitude, s } => TestFunction::MollifiedQuadratic {
                amplitude: amplitude * c,
                s,
            },
            TestFunction::CubicExponential { amplitude } => TestFunction::CubicExponential {
                amplitude: amplitude * c,
            },
        }
    }

    /// Frequency cutoff beyond which `|ĝ|` is negligible.
    fn xi_max(&self) -> f64 {
        match *self {
            TestFunction::Gaussian { s, .. } | TestFunction::MollifiedQuadratic { s, .. } => 12.0 / s,
            TestFunction::CubicExponential { .. } => 400.0,
        }
    }

    /// `ĝ(ξ)`.
    pub fn transform(&self, xi: f64) -> Complex64 {
        let z = Complex64::new(1.0, xi);
        let norm = 1.0 / (2.0 * PI);
        match *self {
            TestFunction::Gaussian { amplitude, mu, s } => {
                let e = (z * mu + z * z * (s * s / 2.0)).exp();
                e * (amplitude * s * (2.0 * PI).sqrt() * norm)
            }
            TestFunction::MollifiedQuadratic { amplitude, s } => {
                let quad = -z.inv() - 2.0 * z.powi(-2) + 2.0 * (z.exp() - 1.0) * z.powi(-3);
                quad * (z * z * (s * s / 2.0)).exp() * (amplitude * norm)
            }
            TestFunction::CubicExponential { amplitude } => {
                let w = Complex64::new(4.0, -xi);
                w.powi(-4) * (6.0 * amplitude * norm)
            }
        }
    }

    /// `f'(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            TestFunction::Gaussian { amplitude, mu, s } => {
                let u = (t - mu) / s;
                -amplitude * u / s * (-u * u / 2.0).exp()
            }
            TestFunction::MollifiedQuadratic { amplitude, s } => {
                let phi = |x: f64| (-x * x / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt());
                let cdf = |x: f64| 0.5 * (1.0 + libm::erf(x / (s * SQRT_2)));
                // ∫_0^1 (1 - r) φ(t - r) dr
                let smear = (1.0 - t) * (cdf(t) - cdf(t - 1.0)) - s * s * (phi(t) - phi(t - 1.0));
                amplitude * (phi(t) - 2.0 * smear)
            }
            TestFunction::CubicExponential { amplitude } => {
                if t < 0.0 {
                    0.0
                } else {
                    amplitude * t * t * (3.0 - 5.0 * t) * (-5.0 * t).exp()
                }
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            TestFunction::Gaussian { mu, s, .. } => {
                let hi = mu + 14.0 * s;
                let mut pts = vec![0.0];
                let mut x = (mu - 14.0 * s).max(0.0);
                while x < hi {
                    if x > 0.0 {
                        pts.push(x);
                    }
                    x += s;
                }
                pts.push(hi);
                pts
            }
            TestFunction::MollifiedQuadratic { s, .. } => {
                let hi = 1.0 + 14.0 * s;
                let n = (hi / s).ceil() as usize;
                (0..=n).map(|i| hi * i as f64 / n as f64).collect()
            }
            TestFunction::CubicExponential { .. } => vec![0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierOptions {
    /// Grid spacing in `ξ`.
    pub step: f64,
    pub tolerance: f64,
}

impl Default for FourierOptions {
    fn default() -> Self {
        Self {
            step: 0.25,
            tolerance: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierReport {
    pub function: TestFunction,
    pub lhs: f64,
    /// Imaginary part of the left side; zero up to discretisation error.
    pub lhs_imag: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub grid_points: usize,
    pub passed: bool,
}

pub fn fourier_kernel_check(opts: FourierOptions) -> Vec<FourierReport> {
    TestFunction::defaults()
        .iter()
        .map(|f| check_function(f, opts))
        .collect()
}

pub fn check_function(f: &TestFunction, opts: FourierOptions) -> FourierReport {
    let lhs = kernel_side(f, opts.step);
    let rhs = derivative_side(f);
    let abs_diff = (lhs.re - rhs).abs().max(lhs.im.abs());
    let n = (2.0 * f.xi_max() / opts.step).ceil() as usize + 1;
    FourierReport {
        function: *f,
        lhs: lhs.re,
        lhs_imag: lhs.im,
        rhs,
        abs_diff,
        grid_points: n,
        passed: abs_diff < opts.tolerance,
    }
}

fn kernel_side(f: &TestFunction, step: f64) -> Complex64 {
    let half = (f.xi_max() / step).ceil() as i64;
    let xs: Vec<f64> = (-half..=half).map(|i| i as f64 * step).collect();
    let gh: Vec<Complex64> = xs.iter().map(|&x| f.transform(x)).collect();
    let weights: Vec<Complex64> = xs
        .iter()
        .zip(&gh)
        .map(|(&x, &g)| Complex64::new(1.0, x) * g)
        .collect();
    let rows: Vec<Complex64> = (0..xs.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..xs.len() {
                let denom = Complex64::new(2.0, xs[i] + xs[j]);
                acc += weights[j] / denom;
            }
            acc * weights[i]
        })
        .collect();
    rows.iter().sum::<Complex64>() * (step * step)
}

fn derivative_side(f: &TestFunction) -> f64 {
    f.breakpoints()
        .windows(2)
        .map(|w| {
            double_exponential::integrate(|t| f.derivative(t).powi(2), w[0], w[1], 1e-13).integral
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transforms_match_direct_quadrature() {
        for f in TestFunction::defaults() {
            for xi in [0.0, 1.5, -4.0] {
                let piecewise = |h: &dyn Fn(f64) -> f64| {
                    [-1.0, 0.0, 1.0, 4.0, 16.0]
                        .windows(2)
                        .map(|w| double_exponential::integrate(h, w[0], w[1], 1e-13).integral)
                        .sum::<f64>()
                        / (2.0 * PI)
                };
                let re = piecewise(&|t| t.exp() * value(&f, t) * (xi * t).cos());
                let im = piecewise(&|t| t.exp() * value(&f, t) * (xi * t).sin());
                let g = f.transform(xi);
                assert!((g.re - re).abs() < 1e-7, "{} at {xi}: {} vs {re}", f.name(), g.re);
                assert!((g.im - im).abs() < 1e-7, "{} at {xi}: {} vs {im}", f.name(), g.im);
            }
        }
    }

    // Independent evaluation of f by direct integration, for the oracle above.
    fn value(f: &TestFunction, t: f64) -> f64 {
        match *f {
            TestFunction::Gaussian { amplitude, mu, s } => {
                amplitude * (-(t - mu).powi(2) / (2.0 * s * s)).exp()
            }
            TestFunction::MollifiedQuadratic { amplitude, s } => {
                let k = |r: f64| {
                    (1.0 - r).powi(2) * (-(t - r).powi(2) / (2.0 * s * s)).exp()
                        / (s * (2.0 * PI).sqrt())
                };
                amplitude * double_exponential::integrate(k, 0.0, 1.0, 1e-13).integral
            }
            TestFunction::CubicExponential { amplitude } => {
                if t < 0.0 {
                    0.0
                } else {
                    amplitude * t.powi(3) * (-5.0 * t).exp()
                }
            }
        }
    }

    #[test]
    fn identity_holds_for_defaults() {
        for r in fourier_kernel_check(FourierOptions::default()) {
            assert!(r.passed, "{r:?}");
            assert!(r.rhs > 0.1);
        }
    }

    #[test]
    fn zero_and_scaling() {
        let f = TestFunction::defaults()[0];
        let zero = check_function(&f.scaled(0.0), FourierOptions::default());
        assert_eq!(zero.lhs, 0.0);
        assert_eq!(zero.rhs, 0.0);
        let one = check_function(&f, FourierOptions::default());
        let two = check_function(&f.scaled(2.0), FourierOptions::default());
        assert!((two.lhs - 4.0 * one.lhs).abs() < 1e-9 * one.lhs.abs());
        assert!((two.rhs - 4.0 * one.rhs).abs() < 1e-9 * one.rhs.abs());
    }
}
