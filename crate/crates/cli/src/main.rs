use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

mod commands;
mod manifest;

/// Default key directory when `--keys` is not given.
pub const KEY_DIR_ENV: &str = "ZKATTEST_KEY_DIR";

#[derive(Parser)]
#[command(name = "zkattest", version, about = "Private process attestation: evidence, proofs, verification and analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate proving and verifying keys for a session configuration.
    Setup {
        /// Session configuration (JSON); defaults to the basic circuit.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed for the deterministic test setup; random when omitted.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Refuse seeded setup, as a production deployment must.
        #[arg(long)]
        production: bool,
    },
    /// Build checkpoints, proofs and range proofs for an event stream.
    Attest {
        /// Event stream (JSON).
        events: PathBuf,
        /// Published population parameters (JSON).
        #[arg(long)]
        population: PathBuf,
        #[command(flatten)]
        keys: KeyDir,
        /// Session configuration; defaults to the one stored with the keys.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Makes the run reproducible; fresh randomness when omitted.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Verify a proof bundle.
    Verify {
        bundle: PathBuf,
        #[command(flatten)]
        keys: KeyDir,
        /// Population parameters every checkpoint must use.
        #[arg(long)]
        population: Option<PathBuf>,
        /// Transcript to cross-check against the bundle.
        #[arg(long)]
        transcript: Option<PathBuf>,
        /// Batch the SNARK checks.
        #[arg(long)]
        batch: bool,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Release population parameters from a raw feature matrix (CSV, one
    /// user per row, milliseconds).
    Stats {
        matrix: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1e-5)]
        delta: f64,
        /// Bounds multiplier recorded with the release.
        #[arg(long, default_value_t = 3)]
        mult: u64,
        /// Clamping interval in ms, applied before aggregation.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.0, 1000.0])]
        clamp: Vec<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analytic leakage, detection and false-accept calculators.
    Analyze(AnalyzeArgs),
    /// Privacy-utility sweep over synthetic sessions.
    Simulate {
        /// Sweep (JSON list of configurations); the built-in sweep otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct KeyDir {
    /// Key directory (falls back to $ZKATTEST_KEY_DIR, then ./keys).
    #[arg(long = "keys")]
    dir: Option<PathBuf>,
}

impl KeyDir {
    fn path(&self) -> PathBuf {
        self.dir
            .clone()
            .or_else(|| std::env::var_os(KEY_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("keys"))
    }
}

#[derive(Args)]
#[command(group(ArgGroup::new("what").required(true).multiple(true).args(["leakage", "detection", "session_bound"])))]
struct AnalyzeArgs {
    /// Minimum leakage for false-accept rate ALPHA.
    #[arg(long, value_name = "ALPHA")]
    leakage: Option<f64>,
    /// Detection probability for fabricated fraction F, K samples, N checkpoints.
    #[arg(long, num_args = 3, value_names = ["F", "K", "N"])]
    detection: Option<Vec<String>>,
    /// Session false-accept bound for ALPHA, N checkpoints, lag-1 correlation R1.
    #[arg(long, num_args = 3, value_names = ["ALPHA", "N", "R1"])]
    session_bound: Option<Vec<String>>,
}

/// Failure classes and their exit codes.
pub enum Failure {
    /// Verification ran and rejected: exit 1.
    Reject,
    /// Bad arguments, configuration or input: exit 2.
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Setup { config, seed, out, production } => commands::setup(config, seed, &out, production),
        Command::Attest { events, population, keys, config, seed, out } => {
            commands::attest(&events, &population, &keys.path(), config, seed, &out)
        }
        Command::Verify { bundle, keys, population, transcript, batch, json } => {
            commands::verify(&bundle, &keys.path(), population, transcript, batch, json)
        }
        Command::Stats { matrix, eps, delta, mult, clamp, seed, out } => {
            commands::stats(&matrix, eps, delta, mult, (clamp[0], clamp[1]), seed, out)
        }
        Command::Analyze(a) => commands::analyze(a.leakage, a.detection, a.session_bound),
        Command::Simulate { config, seed, out } => commands::simulate(config, seed, out),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Reject) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
