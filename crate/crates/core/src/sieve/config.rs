use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::{gcd, primorial};
use crate::tuples::{is_admissible, Tuple};
use crate::variational::GShape;

pub const DEFAULT_DELTA: f64 = 0.25;
pub const DEFAULT_W_BOUND: f64 = 7.0;
/// Largest truncation parameter supported by the divisor-tuple keys.
pub const MAX_R: u64 = 1 << 20;

/// Default profile for a `k`-dimensional sieve: `l = 1.05`, `A = 1` and
/// `T = k / l`, so the per-coordinate cap `T/k` equals `τ` and only the
/// simplex constraint is active.
pub fn default_shape(k: usize) -> GShape {
    let l = 1.05;
    GShape {
        l,
        a: 1.0,
        t: k as f64 / l,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SieveConfig {
    pub n: u64,
    pub delta: f64,
    pub r: u64,
    pub w_bound: f64,
    pub w: u64,
    pub b0: u64,
    pub tuple: Tuple,
    pub shape: GShape,
}

impl SieveConfig {
    pub fn new(n: u64, delta: f64, tuple: Tuple) -> Result<Self> {
        let shape = default_shape(tuple.k());
        Self::with_parts(n, delta, tuple, shape, DEFAULT_W_BOUND, None)
    }

    /// Builds and validates a configuration. `b0 = None` picks the smallest
    /// positive residue compatible with every shift.
    pub fn with_parts(
        n: u64,
        delta: f64,
        tuple: Tuple,
        shape: GShape,
        w_bound: f64,
        b0: Option<u64>,
    ) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::domain(format!("δ must lie in (0, 1), got {delta}")));
        }
        let r = truncation(n, delta);
        let w = primorial(w_bound)?;
        let b0 = match b0 {
            Some(b) => b,
            None => smallest_b0(&tuple, w)?,
        };
        let cfg = Self {
            n,
            delta,
            r,
            w_bound,
            w,
            b0,
            tuple,
            shape,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_shape(self, shape: GShape) -> Result<Self> {
        Self::with_parts(self.n, self.delta, self.tuple, shape, self.w_bound, Some(self.b0))
    }

    pub fn with_w_bound(self, w_bound: f64) -> Result<Self> {
        Self::with_parts(self.n, self.delta, self.tuple, self.shape, w_bound, None)
    }

    pub fn with_b0(self, b0: u64) -> Result<Self> {
        Self::with_parts(self.n, self.delta, self.tuple, self.shape, self.w_bound, Some(b0))
    }

    pub fn k(&self) -> usize {
        self.tuple.k()
    }

    pub fn tau(&self) -> f64 {
        1.0 / self.shape.l
    }

    pub fn validate(&self) -> Result<()> {
        GShape::new(self.shape.l, self.shape.a, self.shape.t)?;
        if !(self.shape.l > 1.0) {
            return Err(Error::domain(format!("l must exceed 1, got {}", self.shape.l)));
        }
        if self.r < 2 {
            return Err(Error::condition(format!(
                "R = floor(N^δ) = {} must be at least 2",
                self.r
            )));
        }
        if self.r > MAX_R {
            return Err(Error::Resource {
                what: "truncation parameter R",
                requested: self.r,
                budget: MAX_R,
            });
        }
        if self.n < 100 * self.r {
            return Err(Error::condition(format!(
                "N = {} must be at least 100 R = {}",
                self.n,
                100 * self.r
            )));
        }
        let adm = is_admissible(&self.tuple);
        if let Some(wit) = adm.witness {
            return Err(Error::condition(format!(
                "tuple {} is not admissible: it covers every class mod {}",
                self.tuple, wit.prime
            )));
        }
        for &h in self.tuple.offsets() {
            let v = (self.b0 as i64 + h).rem_euclid(self.w as i64) as u64;
            if gcd(v, self.w) != 1 {
                return Err(Error::condition(format!(
                    "gcd(b0 + {h}, W) != 1 for b0 = {}, W = {}",
                    self.b0, self.w
                )));
            }
        }
        Ok(())
    }
}

/// `floor(N^δ)`, corrected for rounding in the floating-point power.
pub fn truncation(n: u64, delta: f64) -> u64 {
    let target = delta * (n as f64).ln();
    let mut r = target.exp().floor() as u64;
    while r > 1 && (r as f64).ln() > target + 1e-12 {
        r -= 1;
    }
    while ((r + 1) as f64).ln() <= target + 1e-12 {
        r += 1;
    }
    r
}

fn smallest_b0(tuple: &Tuple, w: u64) -> Result<u64> {
    (1..=w)
        .find(|&b| {
            tuple
                .offsets()
                .iter()
                .all(|&h| gcd((b as i64 + h).rem_euclid(w as i64) as u64, w) == 1)
        })
        .ok_or_else(|| Error::condition(format!("no residue b0 mod {w} avoids every shift")))
}
