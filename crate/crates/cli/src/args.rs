use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use workbench_core::sieve::{DEFAULT_DELTA, DEFAULT_W_BOUND};
use workbench_core::Tuple;

#[derive(Debug, Parser)]
#[command(name = "workbench", version, about = "Prime-gap and sieve experiments", args_override_self = true)]
pub struct Cli {
    /// TOML file with top-level options and one table per subcommand.
    /// Command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "WORKBENCH_THREADS")]
    pub threads: Option<usize>,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prime counts, Goldbach gaps, difference counts and normalized gaps.
    Primes(PrimesArgs),
    /// Profile integrals, tail bounds, moment ratios, Monte Carlo and the
    /// Fourier identity.
    Variational(VariationalArgs),
    /// Moment sums of the sieve weights.
    Sieve(SieveArgs),
    /// Mirrored-tuple window scan over even N.
    GoldbachScan(GoldbachArgs),
    /// Difference densities and difference graphs.
    Density(DensityArgs),
    /// Cell partitions and β-subsequences.
    Gaps(GapsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Primes(_) => "primes",
            Command::Variational(_) => "variational",
            Command::Sieve(_) => "sieve",
            Command::GoldbachScan(_) => "goldbach-scan",
            Command::Density(_) => "density",
            Command::Gaps(_) => "gaps",
        }
    }
}

pub const SUBCOMMANDS: [&str; 6] = ["primes", "variational", "sieve", "goldbach-scan", "density", "gaps"];

/// Integer argument; scientific notation such as `1e7` is accepted when
/// the value is integral.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let s = s.trim().replace('_', "");
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if !(x >= 0.0 && x.fract() == 0.0 && x <= 2f64.powi(53)) {
        return Err(format!("{s} is not a nonnegative integer"));
    }
    Ok(x as u64)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PrimesArgs {
    #[arg(long, value_parser = parse_count)]
    pub limit: u64,
    /// Consecutive Goldbach numbers and their gaps.
    #[arg(long, conflicts_with_all = ["gap_counts", "normalized_gaps"])]
    pub goldbach_gaps: bool,
    /// Number of prime pairs at each difference up to `--max-diff`.
    #[arg(long, conflicts_with = "normalized_gaps")]
    pub gap_counts: bool,
    /// `(p' - p)/ln p` for consecutive primes.
    #[arg(long)]
    pub normalized_gaps: bool,
    #[arg(long, value_parser = parse_count, default_value = "100")]
    pub max_diff: u64,
    /// Count only consecutive primes in `--gap-counts`.
    #[arg(long)]
    pub consecutive: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VariationalArgs {
    #[arg(long, value_parser = parse_count)]
    pub k: u64,
    /// `loglog`, a fixed value in (0, 1), or `auto` (loglog when
    /// ln ln k > 1, else 0.5).
    #[arg(long, default_value = "auto")]
    pub psi: String,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Explicit profile; replaces the schedule.
    #[arg(long, requires_all = ["a", "t"])]
    pub l: Option<f64>,
    #[arg(long, requires_all = ["l", "t"])]
    pub a: Option<f64>,
    #[arg(long, requires_all = ["l", "a"])]
    pub t: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub mc_samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SamplerArg::Product)]
    pub sampler: SamplerArg,
    /// Also run the Fourier kernel check.
    #[arg(long)]
    pub fourier: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerArg {
    Product,
    Uniform,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SieveArgs {
    #[arg(long = "N", value_parser = parse_count)]
    #[serde(rename = "N")]
    pub n: u64,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long)]
    pub tuple: Tuple,
    #[arg(long, default_value_t = DEFAULT_W_BOUND)]
    pub w_bound: f64,
    #[arg(long, value_parser = parse_count)]
    pub b0: Option<u64>,
    #[arg(long, requires_all = ["a", "t"])]
    pub l: Option<f64>,
    #[arg(long, requires_all = ["l", "t"])]
    pub a: Option<f64>,
    #[arg(long, requires_all = ["l", "a"])]
    pub t: Option<f64>,
    /// Sum over `[N/2, N]` instead of `[1, N]`.
    #[arg(long, conflicts_with = "lo")]
    pub range_half: bool,
    #[arg(long, requires = "hi", value_parser = parse_count)]
    pub lo: Option<u64>,
    #[arg(long, requires = "lo", value_parser = parse_count)]
    pub hi: Option<u64>,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub m: i64,
    /// Also compare against a modified profile on entries `i,j`.
    #[arg(long, value_delimiter = ',')]
    pub tao: Option<Vec<usize>>,
    /// The modified profile multiplies `T` by this factor.
    #[arg(long, default_value_t = 0.5)]
    pub tao_t_scale: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GoldbachArgs {
    /// A single even N.
    #[arg(long = "N", value_parser = parse_count, conflicts_with_all = ["from", "to"], required_unless_present = "from")]
    #[serde(rename = "N")]
    pub n: Option<u64>,
    /// Every even N in `[from, to]`.
    #[arg(long, value_parser = parse_count, requires = "to")]
    pub from: Option<u64>,
    #[arg(long, value_parser = parse_count, requires = "from")]
    pub to: Option<u64>,
    #[arg(long, default_value = "0,2")]
    pub tuple: Tuple,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value_t = DEFAULT_W_BOUND)]
    pub w_bound: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DensityArgs {
    #[arg(long, value_parser = parse_count)]
    pub limit: u64,
    #[arg(long, value_parser = parse_count, default_value = "1")]
    pub threshold: u64,
    #[arg(long, value_parser = parse_count)]
    pub max_diff: u64,
    /// Build the difference graph on `2, ..., 2N` with the realised
    /// differences as the excluded set.
    #[arg(long, value_parser = parse_count)]
    pub graph_n: Option<u64>,
    #[arg(long, default_value_t = 2)]
    pub ktt: usize,
    #[arg(long, default_value_t = 1.0)]
    pub kst_c: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GapsArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub beta: Vec<f64>,
    #[arg(long, value_parser = parse_count, default_value = "1e6")]
    pub gap_limit: u64,
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
    #[arg(long, default_value_t = 2)]
    pub min_len: usize,
    /// Tuple to partition into cells for a singleton scan.
    #[arg(long)]
    pub tuple: Option<Tuple>,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 1)]
    pub m: u64,
    #[arg(long, value_parser = parse_count, default_value = "1")]
    pub lo: u64,
    #[arg(long, value_parser = parse_count, default_value = "1e5")]
    pub hi: u64,
    #[arg(long, default_value_t = 1)]
    pub min_singletons: usize,
    /// Number of scan hits listed in the output.
    #[arg(long, default_value_t = 20)]
    pub max_hits: usize,
}
