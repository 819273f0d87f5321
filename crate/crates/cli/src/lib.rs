//! Command-line front end: `kinf`, `bcp`, `simulate` and `verify`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure,
//! 4 property-suite failure. Errors go to stderr as one JSON object.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use medbandits::Error;

pub const THREADS_ENV: &str = "MEDBANDITS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "medbandits", version, about = "Minimum empirical divergence bandits: divergences, policies, BCP checks")]
pub struct Cli {
    /// Worker threads for replications and Monte Carlo (default: $MEDBANDITS_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a divergence on a sample or an arm model.
    Kinf(KinfArgs),
    /// Boundary-crossing probability profile as CSV.
    Bcp(BcpArgs),
    /// Regret curves as CSV.
    Simulate(SimulateArgs),
    /// Run property suites and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct KinfArgs {
    /// kl-bernoulli, kl-poisson, kl-gaussian, bounded, gaussian, hmoment or maillard.
    #[arg(long)]
    pub family: String,
    /// Comma-separated observations.
    #[arg(long, conflicts_with = "arm", allow_hyphen_values = true)]
    pub data: Option<String>,
    /// Arm model instead of a sample, e.g. `bernoulli:0.4`.
    #[arg(long)]
    pub arm: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: f64,
    /// Support upper bound (bounded family).
    #[arg(long, alias = "B")]
    pub upper: Option<f64>,
    /// Known variance (kl-gaussian).
    #[arg(long)]
    pub var: Option<f64>,
    /// Scale of the maillard divergence.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Moment function: `power:P` or `subgauss:SIGMA`.
    #[arg(long)]
    pub h: Option<String>,
    /// Moment bound (power moments).
    #[arg(long)]
    pub bound: Option<f64>,
    #[arg(long)]
    pub uncentered: bool,
    #[arg(long)]
    pub mean_floor: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BcpArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub m: Option<u64>,
    /// Output file (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub replications: Option<u64>,
    /// Inline arm, repeatable, e.g. `--arm bernoulli:0.5 --arm bernoulli:0.4`.
    #[arg(long = "arm")]
    pub arms: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Suite name or `all`.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure of a subcommand, mapped onto an exit code.
#[derive(Debug)]
pub enum Failure {
    Lib(Error),
    Io(String),
    Suites(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Config(_)) | Failure::Io(_) => 2,
            Failure::Lib(_) => 3,
            Failure::Suites(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Lib(Error::Config(_)) => "config",
            Failure::Io(_) => "io",
            Failure::Lib(Error::Domain(_)) => "domain",
            Failure::Lib(Error::NonConvergence(_)) => "non-convergence",
            Failure::Lib(Error::DegenerateSample(_)) => "degenerate-sample",
            Failure::Lib(Error::DegenerateWeight(_)) => "degenerate-weight",
            Failure::Lib(Error::Tie(_)) => "tie",
            Failure::Suites(_) => "suite-failure",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Io(m) => m.clone(),
            Failure::Suites(s) => format!("failing suites: {}", s.join(", ")),
        }
    }

    pub fn record(&self) -> String {
        serde_json::json!({ "error": self.kind(), "exit": self.exit_code(), "message": self.message() }).to_string()
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Failure::Lib(Error::Config(format!("{THREADS_ENV}={v} is not a thread count")))),
        Err(_) => Ok(None),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let f = Failure::Lib(Error::Config(e.kind().to_string()));
            let _ = writeln!(err, "{}", f.record());
            let _ = write!(err, "{}", e.render());
            return 2;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "{}", f.record());
            f.exit_code()
        }
    }
}

/// Text produced by a command and where it goes.
#[derive(Debug)]
pub struct Emit {
    pub text: String,
    pub path: Option<PathBuf>,
    /// Suites that failed; the text is still written.
    pub failed: Vec<String>,
}

impl Emit {
    fn new(text: String, path: Option<PathBuf>) -> Self {
        Self { text, path, failed: Vec::new() }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let threads = thread_count(cli.threads)?;
    let command = cli.command;
    let body = move || match &command {
        Command::Kinf(a) => commands::kinf(a),
        Command::Bcp(a) => commands::bcp(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Verify(a) => commands::verify(a),
    };
    let emit = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Lib(Error::Config(format!("thread pool: {e}"))))?
            .install(body),
        None => body(),
    }?;
    match &emit.path {
        Some(p) => std::fs::write(p, &emit.text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        None => out.write_all(emit.text.as_bytes()).map_err(|e| Failure::Io(format!("stdout: {e}")))?,
    }
    if emit.failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Suites(emit.failed))
    }
}
