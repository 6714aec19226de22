//! Command-line front end: argument parsing, dispatch, output and exit
//! status. Every verb produces a JSON document (canonical) with a fixed CSV
//! projection; errors are reported as a JSON error record on stdout.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod basis;
mod eval;
mod literal;
mod output;
mod process;
pub mod records;
mod verify;

pub use output::Output;

/// Exit status of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    /// A requested check failed.
    Failed = 1,
    /// Malformed arguments, spec file or input.
    Input = 2,
    /// A numeric failure: flagged truncation, unsupported backend, scale.
    Numeric = 3,
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub status: Status,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            status: Status::Input,
            kind: "input",
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self {
            status: Status::Numeric,
            kind: "numeric",
            message: message.into(),
        }
    }
}

impl From<krawtchouk::Error> for CliError {
    fn from(e: krawtchouk::Error) -> Self {
        use krawtchouk::Error as E;
        let (status, kind) = match &e {
            E::Truncation(_) => (Status::Numeric, "truncation"),
            E::Unsupported(_) => (Status::Numeric, "unsupported"),
            E::ScaleExceeded(_) => (Status::Numeric, "scale-exceeded"),
            E::Singular => (Status::Numeric, "singular"),
            E::Spec(_) => (Status::Input, "spec"),
            E::Parse(_) => (Status::Input, "parse"),
            _ => (Status::Input, "domain"),
        };
        Self {
            status,
            kind,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "krawtchouk", version, about = "Multivariate Krawtchouk polynomials and birth-death spectral expansions")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Accept decimal literals for probabilities and rates and compute in
    /// floating point where a verb has an exact mode.
    #[arg(long, global = true)]
    pub float: bool,
    /// Tolerance override (truncation target, comparison bound or suite
    /// bound, depending on the verb).
    #[arg(long, env = "KRAWTCHOUK_TOL", global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a one-dimensional family or a multivariate polynomial.
    Eval(eval::EvalArgs),
    /// Run invariant suites.
    Verify(verify::VerifyArgs),
    /// Construct or validate an orthogonal basis.
    Basis(basis::BasisArgs),
    /// Transition probabilities of a process, composition or urn.
    Transition(process::TransitionArgs),
    /// Stochastic simulation of a composition process or urn.
    Simulate(process::SimulateArgs),
    /// Side-by-side transition probabilities from several methods.
    Compare(process::CompareArgs),
    /// Reproducing-kernel values.
    Kernel(basis::KernelArgs),
}

/// Runs one parsed invocation and returns the output with its status.
pub fn run(cli: &Cli) -> CliResult<(Output, Status)> {
    let g = &cli.global;
    match &cli.command {
        Command::Eval(a) => eval::run(a, g),
        Command::Verify(a) => verify::run(a, g),
        Command::Basis(a) => basis::run(a, g),
        Command::Transition(a) => process::transition(a, g),
        Command::Simulate(a) => process::simulate(a, g),
        Command::Compare(a) => process::compare(a, g),
        Command::Kernel(a) => basis::kernel(a, g),
    }
}

/// Parses `args`, runs, writes to `out`/`err` and returns the exit code.
pub fn main_with(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let _ = write!(err, "{e}");
            let rec = error_record(&CliError::input(first_line(&e.to_string())));
            let _ = writeln!(out, "{}", serde_json::to_string(&rec).expect("serialisable"));
            return Status::Input as i32;
        }
    };
    match run(&cli).and_then(|(o, s)| o.write(cli.global.format, out).map(|_| s)) {
        Ok(status) => status as i32,
        Err(e) => report(&e, out, err),
    }
}

fn first_line(s: &str) -> String {
    s.lines().next().unwrap_or_default().trim_start_matches("error: ").to_string()
}

fn error_record(e: &CliError) -> records::ErrorRecord {
    records::ErrorRecord {
        error: records::ErrorBody {
            kind: e.kind.to_string(),
            message: e.message.clone(),
            status: e.status as i32,
        },
    }
}

fn report(e: &CliError, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let rec = error_record(e);
    let _ = writeln!(out, "{}", serde_json::to_string(&rec).expect("serialisable"));
    let _ = writeln!(err, "error: {}", e.message);
    e.status as i32
}

pub(crate) fn read_file(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}
