use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iasd_core::analysis::{default_profiles, llr_gap_sweep, write_gap_csv, GapSweepConfig};
use iasd_core::combiner::{memory_units, MemoryModel, Scheme};
use iasd_core::harness::{
    default_mcs_list, run_per_experiment, run_throughput_experiment, write_per_csv, write_throughput_csv, SimConfig,
};
use iasd_core::Error;

#[derive(Parser)]
#[command(name = "iasd", version, about = "HARQ combining simulator for IASD receivers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Packet error rate versus transmission index.
    Per(RunArgs),
    /// Throughput of the default MCS list.
    Throughput(RunArgs),
    /// Exact versus whitened LLR magnitudes for the residual-interference model.
    AnalyzeLlr(LlrArgs),
    /// Memory units a combining scheme stores between transmissions.
    Memory(MemoryArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    scheme: Option<String>,
    /// Comma-separated SNR grid in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr_db: Vec<f64>,
}

#[derive(Args)]
struct LlrArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr_db: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    sir_db: f64,
    #[arg(long, default_value_t = 1000)]
    instances: usize,
}

#[derive(Args)]
struct MemoryArgs {
    #[arg(long)]
    scheme: String,
    /// Bits per symbol.
    #[arg(long)]
    nm: usize,
    #[arg(long)]
    ns: usize,
    /// Receive antennas (defaults to `--ns`).
    #[arg(long)]
    nr: Option<usize>,
    /// Transmission index.
    #[arg(long, default_value_t = 1)]
    i: usize,
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidRate(_) | Error::UnknownScheme(_) => Failure::Config(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn load_config(args: &RunArgs) -> Result<SimConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read config file {}: {e}", path.display())))?;
            SimConfig::from_json_str(&text)
                .map_err(|e| Failure::Config(format!("invalid config {}: {e}", path.display())))?
        }
        None => SimConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(s) = &args.scheme {
        cfg.scheme = s.parse()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn grid(args: &[f64], cfg: &SimConfig) -> Vec<f64> {
    if args.is_empty() {
        vec![cfg.link.snr_db]
    } else {
        args.to_vec()
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn create(p: &Path) -> Result<File, Failure> {
    File::create(p).map_err(|e| Failure::Run(format!("cannot create {}: {e}", p.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Per(args) => {
            let cfg = load_config(&args)?;
            let rows = run_per_experiment(&cfg, &grid(&args.snr_db, &cfg))?;
            let mut out = output(&args.out)?;
            write_per_csv(&rows, &mut out)?;
            out.flush()?;
        }
        Command::Throughput(args) => {
            let cfg = load_config(&args)?;
            let rows = run_throughput_experiment(&cfg, &grid(&args.snr_db, &cfg), &default_mcs_list())?;
            let mut out = output(&args.out)?;
            write_throughput_csv(&rows, &mut out)?;
            out.flush()?;
        }
        Command::AnalyzeLlr(args) => {
            let mut cfg = GapSweepConfig {
                sir_db: args.sir_db,
                instances: args.instances,
                seed: args.seed,
                ..GapSweepConfig::default()
            };
            if !args.snr_db.is_empty() {
                cfg.snr_db = args.snr_db;
            }
            let rows = llr_gap_sweep(&cfg, &default_profiles())?;
            let mut out = output(&args.out)?;
            write_gap_csv(&rows, &mut out)?;
            out.flush()?;
        }
        Command::Memory(args) => {
            let m = MemoryModel {
                scheme: args.scheme.parse::<Scheme>()?,
                n_m: args.nm,
                n_s: args.ns,
                n_r: args.nr.unwrap_or(args.ns),
                i: args.i,
            };
            println!("{}", memory_units(&m)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
