use quadrature::double_exponential;
use serde::Serialize;

use super::params::{GParams, GShape};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GIntegrals {
    pub int_g: f64,
    /// `ν = ∫ g²`.
    pub nu: f64,
    pub m_c: f64,
    /// Relative tail bounds; `None` when the centre-of-mass gap is not positive.
    pub tail1_bound: Option<f64>,
    pub tail2_bound: Option<f64>,
}

pub fn g_eval(params: &GParams, t: f64) -> f64 {
    params.shape().eval(t)
}

pub fn g_closed_forms(params: &GParams) -> GIntegrals {
    let shape = params.shape();
    let tails = tail_bounds(params).ok();
    GIntegrals {
        int_g: shape.int_g(),
        nu: shape.nu(),
        m_c: shape.m_c(),
        tail1_bound: tails.map(|t| t.relative1),
        tail2_bound: tails.map(|t| t.relative2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBounds {
    /// Bound on the first tail divided by `k^{-k} ν^k`.
    pub relative1: f64,
    /// Bound on the second tail divided by `k^{-(k+1)} ν^{k-1} (∫g)²`.
    pub relative2: f64,
    pub log_absolute1: f64,
    pub log_absolute2: f64,
    /// `ε = (1 - T/k) / l`.
    pub epsilon: f64,
}

/// Right-hand sides of the two tail inequalities.
pub fn tail_bounds(params: &GParams) -> Result<TailBounds> {
    let shape = params.shape();
    let k = params.kf();
    let epsilon = (1.0 - params.t / k) / params.l;
    let gap = epsilon - shape.m_c();
    if !(gap > 0.0) {
        return Err(Error::domain(format!(
            "center-of-mass condition violated: (1 - T/k)/l - m_c = {gap}"
        )));
    }
    let rel = params.t / (k * params.l) / (gap * gap);
    let (nu, int_g) = (shape.nu(), shape.int_g());
    Ok(TailBounds {
        relative1: rel,
        relative2: rel,
        log_absolute1: -k * k.ln() + k * nu.ln() + rel.ln(),
        log_absolute2: -(k + 1.0) * k.ln() + (k - 1.0) * nu.ln() + 2.0 * int_g.ln() + rel.ln(),
        epsilon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentRatios {
    /// `(∫g)² / (k ν)`.
    pub main: f64,
    pub relative_tail: f64,
    pub j_over_i: f64,
    pub iprime_over_i: f64,
}

/// Product-form evaluation of `J/I` and `I'/I`.
pub fn moment_ratios(params: &GParams) -> Result<MomentRatios> {
    let tails = tail_bounds(params)?;
    let shape = params.shape();
    let main = shape.int_g().powi(2) / (params.kf() * shape.nu());
    Ok(MomentRatios {
        main,
        relative_tail: tails.relative1,
        j_over_i: main * (1.0 - tails.relative1),
        iprime_over_i: main,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureIntegrals {
    pub int_g: f64,
    pub nu: f64,
    pub m_c: f64,
    pub error_estimate: f64,
}

/// `∫g`, `∫g²` and the centre of mass by adaptive double-exponential
/// quadrature on `[0, T]`, independent of the closed forms.
pub fn quadrature_integrals(shape: &GShape) -> QuadratureIntegrals {
    let g = |x: f64| 1.0 / (shape.l + shape.a * x);
    let pieces = split_points(shape);
    let mut err: f64 = 0.0;
    let mut integrate = |f: &dyn Fn(f64) -> f64| -> f64 {
        pieces
            .windows(2)
            .map(|w| {
                let out = double_exponential::integrate(f, w[0], w[1], 1e-14);
                err = err.max(out.error_estimate);
                out.integral
            })
            .sum()
    };
    let int_g = integrate(&|x| g(x));
    let nu = integrate(&|x| g(x) * g(x));
    let first = integrate(&|x| x * g(x) * g(x));
    QuadratureIntegrals {
        int_g,
        nu,
        m_c: first / nu,
        error_estimate: err,
    }
}

// Geometric breakpoints so each piece sees at most a factor-of-two change in
// l + A x; keeps the quadrature well conditioned for large A T / l.
fn split_points(shape: &GShape) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut x = shape.l / shape.a;
    while x < shape.t {
        pts.push(x);
        x *= 2.0;
    }
    pts.push(shape.t);
    pts
}
