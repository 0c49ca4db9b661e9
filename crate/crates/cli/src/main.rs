//! `focklab <subcommand> --config <path> [--out <dir>]`
//!
//! Exit codes: 0 ok, 2 config error, 3 divergence reported as a verdict,
//! 4 invariant violation, 5 other numerical failure. A batch exits with its
//! most severe entry status.

mod config;
mod ops;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

use config::{read_entries, Entry, ExperimentConfig};
use ops::{Outcome, Status};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Parser)]
#[command(name = "focklab", version, about = "Numerical experiments on generalized Fock spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Paths {
    /// JSON config: one experiment object or an array of them.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Print one status line per entry.
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Debug, clap::Args)]
struct OptionalPaths {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Audit the admissibility conditions of a weight.
    WeightCheck(Paths),
    /// Weighted norm of `f`.
    Norm(Paths),
    /// Littlewood-Paley form of the norm of `f`.
    LpNorm(Paths),
    /// Boundedness and compactness of the Volterra-type operator.
    ClassifyVg(Paths),
    /// Symbolic verdict for the companion or multiplication operator.
    VerdictIgmg(Paths),
    /// Monomial witness sequence for the multiplication operator.
    WitnessMg(Paths),
    /// Monomial witness sequence for differentiation.
    WitnessD(Paths),
    /// Build and verify a covering lattice.
    Covering(Paths),
    /// Sub-mean-value survey, tau comparability and local norm equivalence.
    LocalChecks(Paths),
    /// Exploratory ratio of monomial norms for two exponents.
    InclusionDiagnostic(Paths),
    /// Run the full invariant suite and emit the coverage manifest.
    VerifyAll(OptionalPaths),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::WeightCheck(_) => "weight-check",
            Command::Norm(_) => "norm",
            Command::LpNorm(_) => "lp-norm",
            Command::ClassifyVg(_) => "classify-vg",
            Command::VerdictIgmg(_) => "verdict-igmg",
            Command::WitnessMg(_) => "witness-mg",
            Command::WitnessD(_) => "witness-d",
            Command::Covering(_) => "covering",
            Command::LocalChecks(_) => "local-checks",
            Command::InclusionDiagnostic(_) => "inclusion-diagnostic",
            Command::VerifyAll(_) => "verify-all",
        }
    }

    fn paths(&self) -> (Option<&Path>, &Path, bool) {
        match self {
            Command::VerifyAll(p) => (p.config.as_deref(), &p.out, p.verbose),
            Command::WeightCheck(p)
            | Command::Norm(p)
            | Command::LpNorm(p)
            | Command::ClassifyVg(p)
            | Command::VerdictIgmg(p)
            | Command::WitnessMg(p)
            | Command::WitnessD(p)
            | Command::Covering(p)
            | Command::LocalChecks(p)
            | Command::InclusionDiagnostic(p) => (Some(&p.config), &p.out, p.verbose),
        }
    }
}

fn write(path: PathBuf, contents: &str) -> Result<(), CliError> {
    fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
}

/// Writes `<name>.json` and any `<name>.<suffix>` artifacts.
fn emit(out: &Path, operation: &str, entry: &Entry, outcome: &Outcome) -> Result<(), CliError> {
    let mut artifacts: Vec<String> = outcome
        .files
        .iter()
        .map(|(suffix, _)| format!("{}.{suffix}", entry.name))
        .collect();
    artifacts.sort();
    let doc = json!({
        "name": entry.name,
        "operation": operation,
        "status": outcome.status,
        "exit_code": outcome.status.exit_code(),
        "config": entry.config,
        "result": outcome.result,
        "error": outcome.error,
        "artifacts": artifacts,
    });
    let text = serde_json::to_string_pretty(&doc).expect("result documents serialize") + "\n";
    write(out.join(format!("{}.json", entry.name)), &text)?;
    for (suffix, contents) in &outcome.files {
        write(out.join(format!("{}.{suffix}", entry.name)), contents)?;
    }
    Ok(())
}

fn execute(cmd: &Command) -> Result<Status, CliError> {
    let operation = cmd.name();
    let (config, out, verbose) = cmd.paths();
    let entries = match config {
        Some(path) => read_entries(path, operation)?,
        None => vec![Entry {
            name: operation.to_string(),
            config: ExperimentConfig::default(),
        }],
    };
    fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    // entries are independent and write distinct files
    let results = focklab::exec::map(&entries, |e| {
        let outcome = ops::run(operation, &e.config);
        emit(out, operation, e, &outcome).map(|_| outcome.status)
    });
    let mut worst = Status::Ok;
    for (entry, res) in entries.iter().zip(results) {
        let status = res?;
        if verbose {
            eprintln!("{}: {:?} (exit {})", entry.name, status, status.exit_code());
        }
        if status.severity() > worst.severity() {
            worst = status;
        }
    }
    Ok(worst)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(status) => ExitCode::from(status.exit_code() as u8),
        Err(e) => {
            eprintln!("focklab: {e}");
            ExitCode::from(match e {
                CliError::Config(_) => Status::ConfigError.exit_code(),
                CliError::Io { .. } => Status::Error.exit_code(),
            } as u8)
        }
    }
}
