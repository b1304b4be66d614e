//! Integrals of `F(s) = ∏ g(k s_i)` restricted to `{s >= 0, Σ s <= τ}` by
//! nested Gauss-Legendre quadrature.
//!
//! Each level integrates one coordinate after the substitution
//! `v = ln(l + A k (t_i + u))`, which removes the near-pole of `g` when
//! `A k` is large compared with `l`. The innermost level is done in closed
//! form. Pieces are split wherever an inner clip `u <= cap` starts or stops
//! binding, so every piece is smooth.

use serde::Serialize;

use super::params::GShape;
use crate::error::{Error, Result};
use crate::numeric::gauss_legendre;

pub(crate) const ORDER: usize = 24;

#[derive(Debug, Clone, Copy)]
struct Kernel {
    offset: f64,
    slope: f64,
    cap: f64,
    power: i32,
}

impl Kernel {
    /// `∫_0^x (offset + slope u)^{-power} du` with `x` clipped to `cap`.
    fn primitive(&self, x: f64) -> f64 {
        let x = x.min(self.cap);
        if x <= 0.0 {
            return 0.0;
        }
        match self.power {
            1 => (self.slope * x / self.offset).ln_1p() / self.slope,
            _ => x / (self.offset * (self.offset + self.slope * x)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Tail {
    One,
    /// `Γ(r)²` with `Γ(r) = ∫_0^{min(r, cap)} g(k s) ds`.
    GammaSq(Kernel),
}

/// `F = ∏ g(k s_i)` on the simplex of size `τ`, with the cap `s_i <= T/k`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SimplexProfile {
    pub shape: GShape,
    pub k: usize,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SimplexIntegrals {
    /// `∫ F²`.
    pub i: f64,
    /// `∫ (∫ F ds_1)² ds_2 ... ds_k`.
    pub j: f64,
    pub j_over_i: f64,
}

impl SimplexProfile {
    pub fn new(shape: GShape, k: usize, tau: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::domain(format!("τ must lie in (0, 1], got {tau}")));
        }
        Ok(Self { shape, k, tau })
    }

    fn cap(&self) -> f64 {
        self.shape.t / self.k as f64
    }

    fn kernel(&self, t: f64, power: i32) -> Kernel {
        let slope = self.shape.a * self.k as f64;
        Kernel {
            offset: self.shape.l + slope * t,
            slope,
            cap: self.cap() - t,
            power,
        }
    }

    /// `f(t) = ∫_{s >= t} F(s) ds`, the function whose mixed derivative is
    /// `(-1)^k F`. Zero outside the simplex.
    ///
    /// Coordinates are sorted before integrating, so the value does not depend
    /// on their order.
    pub fn f_value(&self, t: &[f64]) -> f64 {
        assert_eq!(t.len(), self.k, "point has wrong dimension");
        let mut ts = t.to_vec();
        ts.sort_by(|a, b| b.total_cmp(a));
        let r = self.tau - ts.iter().sum::<f64>();
        if r <= 0.0 || ts[0] >= self.cap() {
            return 0.0;
        }
        let kernels: Vec<Kernel> = ts.iter().map(|&ti| self.kernel(ti, 1)).collect();
        nested(&kernels, r, Tail::One)
    }

    pub fn i_integral(&self) -> f64 {
        let kernels = vec![self.kernel(0.0, 2); self.k];
        nested(&kernels, self.tau, Tail::One)
    }

    pub fn j_integral(&self) -> f64 {
        let kernels = vec![self.kernel(0.0, 2); self.k - 1];
        nested(&kernels, self.tau, Tail::GammaSq(self.kernel(0.0, 1)))
    }

    pub fn integrals(&self) -> SimplexIntegrals {
        let i = self.i_integral();
        let j = self.j_integral();
        SimplexIntegrals {
            i,
            j,
            j_over_i: j / i,
        }
    }

    /// `∫∫_{s_1 + s_2 <= r} g(k s_1) g(k s_2)`, the two-coordinate integral
    /// inside the second derivative of `f`.
    pub(crate) fn pair_mass(&self, r: f64) -> f64 {
        let kernels = [self.kernel(0.0, 1); 2];
        nested(&kernels, r, Tail::One)
    }

    /// `∫_0^r g(k s) ds` with the cap applied.
    pub(crate) fn gamma(&self, r: f64) -> f64 {
        self.kernel(0.0, 1).primitive(r)
    }
}

fn nested(kernels: &[Kernel], r: f64, tail: Tail) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    let Some((first, rest)) = kernels.split_first() else {
        return match tail {
            Tail::One => 1.0,
            Tail::GammaSq(g) => g.primitive(r).powi(2),
        };
    };
    if let Tail::One = tail {
        let total: f64 = kernels.iter().map(|k| k.cap.max(0.0)).sum();
        if total <= r {
            return kernels.iter().map(|k| k.primitive(k.cap)).product();
        }
        if rest.is_empty() {
            return first.primitive(r);
        }
    }
    let upper = first.cap.min(r);
    if upper <= 0.0 {
        return 0.0;
    }

    let mut caps: Vec<f64> = rest.iter().map(|k| k.cap.max(0.0)).collect();
    if let Tail::GammaSq(g) = tail {
        caps.push(g.cap.max(0.0));
    }
    let mut points = vec![0.0, upper];
    for mask in 1u32..(1 << caps.len()) {
        let s: f64 = (0..caps.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| caps[b])
            .sum();
        let u = r - s;
        if u > 0.0 && u < upper {
            points.push(u);
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * upper);

    let rule = gauss_legendre(ORDER);
    let (o, s) = (first.offset, first.slope);
    let mut total = 0.0;
    for w in points.windows(2) {
        let (va, vb) = ((o + s * w[0]).ln(), (o + s * w[1]).ln());
        total += rule.integrate(va, vb, |v| {
            let e = v.exp();
            let u = ((e - o) / s).clamp(w[0], w[1]);
            let jac = if first.power == 1 { 1.0 / s } else { 1.0 / (s * e) };
            jac * nested(rest, r - u, tail)
        });
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use quadrature::double_exponential::integrate;

    fn shape() -> GShape {
        GShape::new(1.5, 2.0, 0.9).unwrap()
    }

    #[test]
    fn one_dimension_is_closed_form() {
        let p = SimplexProfile::new(shape(), 1, 1.0 / 1.5).unwrap();
        for t in [0.0, 0.1, 0.5] {
            let want = shape().primitive(p.tau.min(0.9)) - shape().primitive(t);
            assert!((p.f_value(&[t]) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn product_when_simplex_does_not_bind() {
        let g = GShape::new(2.0, 3.0, 0.4).unwrap();
        let p = SimplexProfile::new(g, 3, 0.5).unwrap();
        let want = (g.primitive(0.4) / 3.0).powi(3);
        assert!((p.f_value(&[0.0, 0.0, 0.0]) - want).abs() < 1e-15);
        let want_i = (g.primitive_sq(0.4) / 3.0).powi(3);
        assert!((p.i_integral() - want_i).abs() < 1e-15 * want_i.abs().max(1.0));
    }

    #[test]
    fn two_dimensions_match_adaptive_quadrature() {
        let g = shape();
        let p = SimplexProfile::new(g, 2, 1.0 / 1.5).unwrap();
        let k = 2.0;
        let cap = g.t / k;
        for t in [[0.0, 0.0], [0.1, 0.05], [0.3, 0.2]] {
            let r = p.tau - t[0] - t[1];
            let inner = |s1: f64| {
                let hi = (r - s1).min(cap - t[1]).max(0.0);
                let gg = g.eval(k * (t[0] + s1));
                gg * (g.primitive(k * (t[1] + hi)) - g.primitive(k * t[1])) / k
            };
            let hi = (cap - t[0]).min(r).max(0.0);
            let kink = (r - (cap - t[1])).clamp(0.0, hi);
            let want = integrate(inner, 0.0, kink, 1e-13).integral
                + integrate(inner, kink, hi, 1e-13).integral;
            let got = p.f_value(&t);
            assert!((got - want).abs() < 1e-11, "{t:?}: {got} vs {want}");
        }
    }

    #[test]
    fn i_and_j_match_adaptive_quadrature_in_two_dimensions() {
        let g = shape();
        let p = SimplexProfile::new(g, 2, 1.0 / 1.5).unwrap();
        let (k, cap, tau) = (2.0, g.t / 2.0, p.tau);
        let kink = tau - cap;
        let split = |f: &dyn Fn(f64) -> f64| {
            integrate(f, 0.0, kink, 1e-14).integral + integrate(f, kink, cap.min(tau), 1e-14).integral
        };
        let i_want = split(
            &|s1: f64| {
                let gg = g.eval(k * s1);
                gg * gg * g.primitive_sq(k * (tau - s1).min(cap)) / k
            },
        );
        let j_want = split(
            &|s2: f64| {
                let gg = g.eval(k * s2);
                let gamma = g.primitive(k * (tau - s2).min(cap)) / k;
                gg * gg * gamma * gamma
            },
        );
        let got = p.integrals();
        assert!((got.i - i_want).abs() < 1e-12);
        assert!((got.j - j_want).abs() < 1e-12);
    }

    #[test]
    fn symmetric_in_coordinates() {
        let p = SimplexProfile::new(shape(), 3, 0.6).unwrap();
        let a = p.f_value(&[0.1, 0.02, 0.2]);
        let b = p.f_value(&[0.2, 0.1, 0.02]);
        assert_eq!(a, b);
        assert!(a > 0.0);
        assert_eq!(p.f_value(&[0.3, 0.3, 0.1]), 0.0);
    }
}
