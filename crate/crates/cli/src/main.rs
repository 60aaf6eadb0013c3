//! `ouroboros` command-line front end.
//!
//! Every command prints `{"manifest": ..., "result": ...}` as JSON. Exit
//! status: 0 when every requested check passes (or a run completes), 1 when
//! a mathematical check fails, 2 on invalid input.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "ouroboros", version, about = "Check and search for functions with f(f(x), ..., f(x)) = f(x)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test whether a linear form or an expression is Ouroboros.
    Check(CheckArgs),
    /// Residuals of the transport equations and the combined system.
    Pde(PdeArgs),
    /// Expectation of a discrete random variable and E[E[X]] = E[X].
    Expect(ExpectArgs),
    /// Multi-start polynomial search over the combined system.
    Explore(ExploreArgs),
    /// Print the tool version.
    Version,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// JSON config file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Linear form coefficients, e.g. `0.25,0.75` or `1/3,2/3`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "expr")]
    pub coeffs: Option<String>,
    /// Expression in x1, x2, ...
    #[arg(long, allow_hyphen_values = true)]
    pub expr: Option<String>,
    /// Dimension of the sampling domain (defaults to the highest variable index).
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Defaults to 1e-12 for coefficients and 1e-9 for sampled expressions.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, ValueEnum)]
pub enum Equation {
    #[serde(rename = "I")]
    #[value(name = "I", alias = "i")]
    I,
    #[serde(rename = "II")]
    #[value(name = "II", alias = "ii")]
    II,
    #[serde(rename = "system")]
    #[value(name = "system")]
    System,
}

#[derive(Debug, Args)]
pub struct PdeArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "expr")]
    pub coeffs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub expr: Option<String>,
    #[arg(long, value_enum)]
    pub eq: Option<Equation>,
    /// Equation I only; defaults to n.
    #[arg(long)]
    pub beta: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Also compare odd- and even-index coefficient sums (needs --coeffs, even n).
    #[arg(long)]
    pub prop3: bool,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ExpectArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// JSON file `{"values": [...], "probs": [...]}`.
    #[arg(long, conflicts_with_all = ["values", "probs"])]
    pub rv: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub probs: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Init {
    Random,
    Mean,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, value_enum)]
    pub init: Option<Init>,
    #[arg(long)]
    pub init_scale: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub w_eq_i: Option<f64>,
    #[arg(long)]
    pub w_eq_ii: Option<f64>,
    #[arg(long)]
    pub w_ouroboros: Option<f64>,
    #[arg(long)]
    pub convergence_tol: Option<f64>,
    #[arg(long)]
    pub objective_threshold: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write one CSV row per start.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Bad input; exit status 2.
#[derive(Debug)]
pub struct InputError {
    pub message: String,
    /// Extra lines, e.g. a caret under a syntax error.
    pub detail: Option<String>,
}

impl InputError {
    pub fn new(message: impl Into<String>) -> Self {
        Self { message: message.into(), detail: None }
    }
}

impl From<ouroboros::Error> for InputError {
    fn from(e: ouroboros::Error) -> Self {
        Self::new(e.to_string())
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub config: Value,
    pub seed: Option<u64>,
    pub tool_version: &'static str,
    pub timestamp: String,
}

#[derive(Debug, Serialize)]
pub struct Envelope<R> {
    pub manifest: RunManifest,
    pub result: R,
}

/// A finished command: the envelope, whether its checks passed, and where
/// to put it.
pub struct Outcome {
    pub json: String,
    pub passed: bool,
    pub out: Option<PathBuf>,
}

pub fn envelope<C: Serialize, R: Serialize>(
    command: &'static str,
    config: &C,
    seed: Option<u64>,
    result: &R,
) -> String {
    let manifest = RunManifest {
        command,
        config: serde_json::to_value(config).expect("configs serialize"),
        seed,
        tool_version: TOOL_VERSION,
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    let mut text = serde_json::to_string_pretty(&Envelope { manifest, result }).expect("reports serialize");
    text.push('\n');
    text
}

fn run(cli: Cli) -> Result<Outcome, InputError> {
    match cli.command {
        Command::Check(a) => commands::check(a),
        Command::Pde(a) => commands::pde(a),
        Command::Expect(a) => commands::expect(a),
        Command::Explore(a) => commands::explore(a),
        Command::Version => Ok(commands::version()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => {
            let written = match &outcome.out {
                Some(path) => std::fs::write(path, &outcome.json)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => std::io::stdout().lock().write_all(outcome.json.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(msg) = written {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            if let Some(detail) = e.detail {
                eprintln!("{detail}");
            }
            ExitCode::from(2)
        }
    }
}
