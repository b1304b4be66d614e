use serde::Serialize;

use crate::error::{Error, Result};

/// The profile `g(x) = 1_[0,T](x) / (l + A x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GShape {
    pub l: f64,
    pub a: f64,
    pub t: f64,
}

impl GShape {
    pub fn new(l: f64, a: f64, t: f64) -> Result<Self> {
        for (name, v) in [("l", l), ("A", a), ("T", t)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { l, a, t })
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if (0.0..=self.t).contains(&x) {
            1.0 / (self.l + self.a * x)
        } else {
            0.0
        }
    }

    /// `α` with `e^α = 1 + A T / l`.
    pub fn alpha(&self) -> f64 {
        (self.a * self.t / self.l).ln_1p()
    }

    /// `∫_0^x g` for `x` clipped to `[0, T]`.
    pub fn primitive(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.t);
        (self.a * x / self.l).ln_1p() / self.a
    }

    /// `∫_0^x g²` for `x` clipped to `[0, T]`.
    pub fn primitive_sq(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.t);
        x / (self.l * (self.l + self.a * x))
    }

    pub fn int_g(&self) -> f64 {
        self.alpha() / self.a
    }

    pub fn nu(&self) -> f64 {
        -(-self.alpha()).exp_m1() / (self.l * self.a)
    }

    /// Centre of mass `∫ x g² / ∫ g²`.
    pub fn m_c(&self) -> f64 {
        let alpha = self.alpha();
        let bracket = if alpha < 1e-4 {
            // α/(1 - e^{-α}) - 1 = α/2 + α²/12 - α⁴/720 + ...
            alpha / 2.0 + alpha * alpha / 12.0 - alpha.powi(4) / 720.0
        } else {
            alpha / -(-alpha).exp_m1() - 1.0
        };
        self.l / self.a * bracket
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PsiChoice {
    /// `ψ(k) = 1 / ln ln k`.
    #[default]
    LogLog,
    Fixed(f64),
}

impl PsiChoice {
    pub fn eval(&self, k: f64) -> Result<f64> {
        match *self {
            PsiChoice::LogLog => {
                let ll = k.ln().ln();
                if !(ll > 1.0) {
                    return Err(Error::domain(format!(
                        "ψ(k) = 1/ln ln k needs ln ln k > 1 (k > e^e), got k = {k}"
                    )));
                }
                Ok(1.0 / ll)
            }
            PsiChoice::Fixed(v) if v > 0.0 && v < 1.0 => Ok(v),
            PsiChoice::Fixed(v) => Err(Error::domain(format!("ψ must lie in (0, 1), got {v}"))),
        }
    }
}

/// Full parameter bundle for the `k`-dimensional construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GParams {
    pub k: u64,
    pub l: f64,
    pub a: f64,
    pub t: f64,
    pub tau: f64,
    pub eta: f64,
    pub alpha: f64,
    /// Exponent in `α = ln k - c ln ln k`, when built from the schedule.
    pub c: Option<f64>,
    /// `ψ(k)`, when built from the schedule.
    pub psi: Option<f64>,
    pub enforce_mc: bool,
}

impl GParams {
    pub fn new(k: u64, l: f64, a: f64, t: f64) -> Result<Self> {
        let shape = GShape::new(l, a, t)?;
        let p = Self {
            k,
            l,
            a,
            t,
            tau: 1.0 / l,
            eta: 0.0,
            alpha: shape.alpha(),
            c: None,
            psi: None,
            enforce_mc: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        self.eta = eta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_enforced_mc(mut self) -> Result<Self> {
        self.enforce_mc = true;
        self.validate()?;
        Ok(self)
    }

    /// `ψ` from `psi`, `l = 1/ψ`, `A = l² ln k`, `α = ln k - c ln ln k` and
    /// `T = l (e^α - 1) / A`.
    pub fn schedule(k: u64, psi: PsiChoice, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::domain(format!("c must be positive, got {c}")));
        }
        let kf = k as f64;
        let psi_k = psi.eval(kf)?;
        let l = 1.0 / psi_k;
        let a = l * l * kf.ln();
        let alpha = kf.ln() - c * kf.ln().ln();
        if !(alpha > 0.0) {
            return Err(Error::condition(format!(
                "α = ln k - c ln ln k = {alpha} must be positive"
            )));
        }
        let t = l * alpha.exp_m1() / a;
        let mut p = Self::new(k, l, a, t)?;
        p.c = Some(c);
        p.psi = Some(psi_k);
        p.with_enforced_mc()
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::domain(format!("k must be at least 2, got {}", self.k)));
        }
        GShape::new(self.l, self.a, self.t)?;
        if !(self.l > 1.0) {
            return Err(Error::domain(format!("l must exceed 1 so that τ < 1, got {}", self.l)));
        }
        if !(self.eta >= 0.0 && self.eta < self.tau) {
            return Err(Error::domain(format!(
                "η must satisfy 0 <= η < τ = {}, got {}",
                self.tau, self.eta
            )));
        }
        let rel = (self.alpha.exp() - (1.0 + self.a * self.t / self.l)).abs()
            / (1.0 + self.a * self.t / self.l);
        if rel > 1e-12 {
            return Err(Error::invariant(format!("e^α = 1 + AT/l fails by {rel:e}")));
        }
        if self.enforce_mc {
            let m_c = self.shape().m_c();
            let bound = (1.0 - self.t / self.k as f64) / self.l;
            if m_c > bound {
                return Err(Error::condition(format!(
                    "centre of mass m_c = {m_c} exceeds (1 - T/k)/l = {bound}"
                )));
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> GShape {
        GShape {
            l: self.l,
            a: self.a,
            t: self.t,
        }
    }

    pub fn kf(&self) -> f64 {
        self.k as f64
    }

    /// `ψ(k) ln k / k`, the scale the moment ratios are compared against.
    pub fn ratio_scale(&self, psi: PsiChoice) -> Result<f64> {
        let kf = self.kf();
        let psi_k = match self.psi {
            Some(v) => v,
            None => psi.eval(kf)?,
        };
        Ok(psi_k * kf.ln() / kf)
    }
}
