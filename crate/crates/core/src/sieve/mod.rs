//! Multidimensional sieve weights `w(n) = Σ λ_d` and their moment sums.
//!
//! `λ_d = (∏ μ(d_i)) f(log d_1/log R, ...)` with `f` the tail integral of the
//! product profile over the simplex `Σ t_i <= 1/l`; see
//! [`SimplexProfile`](crate::variational::SimplexProfile).

mod config;
mod engine;
mod lambda;
mod window;

pub use config::{default_shape, truncation, SieveConfig, DEFAULT_DELTA, DEFAULT_W_BOUND, MAX_R};
pub use engine::{MomentRange, MomentReport, SieveEngine, TaoReport};
pub use window::{goldbach_window_scan, GoldbachWindow, GoldbachWitness, WindowReport};
