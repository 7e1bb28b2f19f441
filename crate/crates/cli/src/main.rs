//! `densclone`: finite-horizon constructions and checks from the command line.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 construction or search
//! failure, 3 verification failure.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "densclone", version, about = "Exact finite-horizon constructions for clones on ℕ defined by upper density")]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON report to this file instead of standard output.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Print a human-readable table to standard output.
    #[arg(long, global = true)]
    summary: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Prefix ratios and dyadic block densities of a set.
    Density(DensityArgs),
    /// Badness certificates from a witness set, or validation of a certificate file.
    Badness(BadnessArgs),
    /// Look for a shadow whose image is dense on sparse test sets.
    Probe(ProbeArgs),
    /// The onto construction for an increasing sequence.
    Onto(OntoArgs),
    /// The full precompleteness chain for a function and a set.
    Pipeline(PipelineArgs),
    /// Composition laws of the closed monoid for a pair tree.
    Monoid(MonoidArgs),
    /// Express a target function through a right inverse of a binary function.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Set specification, e.g. `squares` or `union(evens, powers:3)`.
    pub set: String,
    /// Comma-separated increasing horizons.
    #[arg(long, value_delimiter = ',')]
    pub horizons: Option<Vec<u64>>,
    #[arg(long)]
    pub k_max: Option<u32>,
}

#[derive(Debug, Args)]
pub struct BadnessArgs {
    /// Function specification.
    pub function: String,
    /// Witness set specification (not needed with --check-certificate).
    pub set: Option<String>,
    /// Positive rational slack in the density condition, e.g. `1/3`.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Number of certificate entries (schedule i = 2, 4, 8, ...) or assembly stages.
    #[arg(long)]
    pub stages: Option<u32>,
    /// Run the iterated global-witness assembly instead of the doubling schedule.
    #[arg(long)]
    pub assemble: bool,
    /// Target upper density for the chain check after assembly.
    #[arg(long)]
    pub delta: Option<String>,
    /// Write the certificate in text form to this file.
    #[arg(long)]
    pub certificate_out: Option<PathBuf>,
    /// Validate the given certificate file against the function.
    #[arg(long)]
    pub check_certificate: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    pub function: String,
    /// Test set specifications.
    #[arg(required = true)]
    pub sets: Vec<String>,
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub a_bound: Option<u64>,
    /// Allow image computations over three or more coordinates.
    #[arg(long)]
    pub confirm_cost: bool,
}

#[derive(Debug, Args)]
pub struct OntoArgs {
    /// `pow2`, `linear:c` (n_i = c·i) or `list:n1,n2,...`.
    pub sequence: String,
    #[arg(long)]
    pub k_max: Option<u32>,
    /// Also check the ideal-preservation bound for this set.
    #[arg(long)]
    pub ideal_set: Option<String>,
    #[arg(long, default_value = "1/8")]
    pub epsilon: String,
    /// Inclusive range `a..b` of k for the ideal check.
    #[arg(long, default_value = "10..14")]
    pub k_range: String,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    pub function: String,
    pub set: String,
    /// Target function to generate at the end.
    #[arg(long)]
    pub target: Option<String>,
}

#[derive(Debug, Args)]
pub struct MonoidArgs {
    /// Tree file, or `builtin:single-branch` / `builtin:full-binary`.
    pub tree: String,
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub branch_cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Binary function to invert.
    pub t: String,
    /// Set the preimages are drawn from.
    pub z: String,
    /// Target function.
    pub target: String,
    #[arg(long)]
    pub n_out: Option<u64>,
    #[arg(long)]
    pub search_horizon: Option<u64>,
    #[arg(long)]
    pub horizon: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let out = match &cli.command {
        Command::Density(a) => commands::density(a, config)?,
        Command::Badness(a) => commands::badness(a, config)?,
        Command::Probe(a) => commands::probe(a, config)?,
        Command::Onto(a) => commands::onto(a, config)?,
        Command::Pipeline(a) => commands::pipeline(a, config)?,
        Command::Monoid(a) => commands::monoid(a, config)?,
        Command::Generate(a) => commands::generate(a, config)?,
    };
    report::emit(&out, cli.report.as_deref(), cli.summary)?;
    Ok(out.code)
}
