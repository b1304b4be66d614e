//! Numerical workbench for bounded-gap and Goldbach-type sieve experiments.
//!
//! The crate is organised bottom-up:
//!
//! * [`primes`]: segmented prime tables, Goldbach numbers, gap statistics.
//! * [`tuples`]: admissible tuples, mirrored unions and the class-trimming
//!   reduction used by the difference-graph argument.
//! * [`variational`]: the one-dimensional profile `g`, its closed forms,
//!   Monte Carlo checks of the simplex integrals and a Fourier identity check.
//! * [`sieve`]: multidimensional sieve weights and their moment sums.
//! * [`density`]: difference graphs and bipartite subgraph searches.
//! * [`gaps`]: partitioned tuples, cell prime counts and gap subsequences.

pub mod density;
pub mod error;
pub mod gaps;
pub mod numeric;
pub mod primes;
pub mod sieve;
pub mod tuples;
pub mod variational;

pub use error::{Error, Result};
pub use primes::PrimeTable;
pub use sieve::{SieveConfig, SieveEngine};

pub use tuples::Tuple;
pub use variational::{GParams, GShape};

