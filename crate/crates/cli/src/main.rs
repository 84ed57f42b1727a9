//! `haa`: batch experiments for ancilla-assisted variational circuits.
//!
//! Every flag can also be set through an `HAA_<FLAG>` environment variable
//! (upper case, dashes as underscores) or a `key = value` line in the file
//! named by `--config`. Flags win over the environment, which wins over the file.
//!
//! Exit codes: 0 success, 1 usage error, 2 input parse error, 3 computation failure.

mod args;
mod commands;
mod config;
mod failure;
mod manifest;
mod output;
mod problem;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use commands::{barrier, descriptors, energy, exact, gates, layers, scan, sweep};
use failure::Failure;
use manifest::{InputDigest, RunManifest};
use output::Format;

#[derive(Parser, Debug)]
#[command(name = "haa", version, about = "Ancilla-assisted VQE experiments on FCIDUMP Hamiltonians")]
struct Cli {
    /// `key = value` file of default flag values.
    #[arg(long, global = true, env = "HAA_CONFIG")]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "HAA_THREADS")]
    threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true, env = "HAA_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "HAA_FORMAT", value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimize one geometry and compare with the exact ground state.
    Energy(energy::EnergyArgs),
    /// Optimize every FCIDUMP in a directory (a potential energy curve).
    Scan(scan::ScanArgs),
    /// Smallest layer count reaching chemical accuracy.
    MinLayers(layers::MinLayersArgs),
    /// Best error over a grid of ancilla and layer counts.
    Sweep(sweep::SweepArgs),
    /// Expressibility and gradient variance of ansatz families.
    Descriptors(descriptors::DescriptorArgs),
    /// Parameter, two-qubit gate and CZ counts.
    Gates(gates::GatesArgs),
    /// Exact ground state and its configuration coefficients.
    Exact(exact::ExactArgs),
    /// Reactant and transition-state energies and their difference.
    Barrier(barrier::BarrierArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Energy(_) => "energy",
            Command::Scan(_) => "scan",
            Command::MinLayers(_) => "min-layers",
            Command::Sweep(_) => "sweep",
            Command::Descriptors(_) => "descriptors",
            Command::Gates(_) => "gates",
            Command::Exact(_) => "exact",
            Command::Barrier(_) => "barrier",
        }
    }
}

fn run(raw: Vec<OsString>) -> Result<(), Failure> {
    let started = Instant::now();
    let config_file = match config::config_path(&raw) {
        Some(path) => {
            let bytes = config::apply(&path, &config::known_keys(&Cli::command()))?;
            Some(InputDigest::new(&path, &bytes))
        }
        None => None,
    };
    // clap reads environment defaults when the command is built, so build it after the file is applied
    let matches = match Cli::command().try_get_matches_from(raw) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return Err(Failure { code: if e.use_stderr() { failure::EXIT_USAGE } else { 0 }, message: String::new() });
        }
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::usage(format!("--threads: {e}")))?;
    }
    let mut report = match &cli.command {
        Command::Energy(a) => energy::run(a),
        Command::Scan(a) => scan::run(a),
        Command::MinLayers(a) => layers::run(a),
        Command::Sweep(a) => sweep::run(a),
        Command::Descriptors(a) => descriptors::run(a),
        Command::Gates(a) => gates::run(a),
        Command::Exact(a) => exact::run(a),
        Command::Barrier(a) => barrier::run(a),
    }?;
    report.inputs.extend(config_file);
    report.config["threads"] = serde_json::json!(cli.threads);
    let manifest = RunManifest::new(cli.command.name(), report.config.clone(), report.inputs.clone(), started);
    output::emit(&report, &manifest, cli.format, cli.out.as_deref())
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {f}");
            }
            ExitCode::from(f.code as u8)
        }
    }
}
