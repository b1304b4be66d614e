//! The `workbench` command line.

pub mod args;
pub mod config;
pub mod output;

mod commands;

use std::ffi::OsString;
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::Parser;
use serde_json::{json, Value};
use workbench_core::Error;

use args::{Cli, Command, Format};
use output::Report;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(io::Error),
}

impl CliError {
    /// 2 usage, 3 resource, 4 parameter condition, 5 internal invariant.
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::Resource { .. } => 3,
                Error::Condition(_) => 4,
                Error::Invariant(_) => 5,
                _ => 2,
            },
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => e.fmt(f),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn sub_params(cmd: &Command) -> Value {
    match cmd {
        Command::Primes(a) => json!(a),
        Command::Variational(a) => json!(a),
        Command::Sieve(a) => json!(a),
        Command::GoldbachScan(a) => json!(a),
        Command::Density(a) => json!(a),
        Command::Gaps(a) => json!(a),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    match try_run(args.into_iter().map(Into::into).collect()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("workbench: {e}");
            e.code()
        }
    }
}

fn try_run(args: Vec<OsString>) -> Result<i32, CliError> {
    let args = config::expand(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return Ok(e.exit_code());
        }
    };
    let threads = match cli.threads {
        Some(0) => return Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} threads: {e}")))?;
    let (body, status) = pool.install(|| commands::execute(&cli.command))?;
    // The output location is left out so that runs written to different
    // files can be compared byte for byte.
    let params = output::merged(
        sub_params(&cli.command),
        serde_json::Map::from_iter([
            ("format".to_string(), json!(cli.format)),
            ("threads".to_string(), json!(threads)),
        ]),
    );
    let report = Report { command: cli.command.name(), params, body };
    let json = cli.format == Format::Json;
    let written = match &cli.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            output::write(&report, json, &mut w).and_then(|_| w.flush())
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            output::write(&report, json, &mut w).and_then(|_| w.flush())
        }
    };
    match written {
        // a closed pipe (`| head`) is not a failure of the run
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(status),
        Err(e) => Err(e.into()),
        Ok(()) => Ok(status),
    }
}
