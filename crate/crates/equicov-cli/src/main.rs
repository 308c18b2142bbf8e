//! `equicov` — config-driven SIR coverage experiments.
//!
//! Subcommands: `sample`, `metadist`, `contour`, `voidtest`. Each takes a
//! sectioned key=value config file plus optional seed/workers/output
//! overrides and writes deterministic CSV artifacts.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 verification
//! failure, 3 runtime/numeric failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or invalid configuration (exit 1).
    Config(String),
    /// An equivalence check ran and failed (exit 2).
    Verification(String),
    /// I/O or numeric failure while running (exit 3).
    Runtime(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) | CliError::Verification(m) | CliError::Runtime(m) => m.fmt(f),
        }
    }
}

impl From<equicov_core::Error> for CliError {
    fn from(e: equicov_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "equicov", version, about = "SIR coverage and equi-coverage scaling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override the seed from the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (overrides config and EQUICOV_WORKERS).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory (overrides the config file).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one typical-user scene and write its point patterns.
    Sample(CommonArgs),
    /// Estimate the meta distribution of SIR.
    Metadist(CommonArgs),
    /// Verify equi-coverage scale families and/or extract level sets.
    Contour(CommonArgs),
    /// Test point-process scaling equivalence via void probabilities.
    Voidtest(CommonArgs),
}

fn load(args: &CommonArgs) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        CliError::Config(format!("cannot read {}: {e}", args.config.display()))
    })?;
    let mut cfg = ExperimentConfig::parse(&text)
        .map_err(|e| prefix_config_path(e, &args.config))?;
    if let Some(seed) = args.seed {
        cfg.run.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn prefix_config_path(err: CliError, path: &std::path::Path) -> CliError {
    match err {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    }
}

/// Worker resolution order: flag, config, EQUICOV_WORKERS, all cores.
fn configure_workers(flag: Option<usize>, cfg: Option<usize>) -> Result<(), CliError> {
    let env = std::env::var("EQUICOV_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    let Some(workers) = flag.or(cfg).or(env) else {
        return Ok(());
    };
    if workers == 0 {
        return Err(CliError::Config("worker count must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| CliError::Runtime(format!("cannot configure worker pool: {e}")))
}

type CommandFn = fn(&ExperimentConfig, &std::path::Path) -> Result<(), CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, run_fn): (&CommonArgs, CommandFn) =
        match &cli.command {
            Command::Sample(a) => (a, commands::cmd_sample),
            Command::Metadist(a) => (a, commands::cmd_metadist),
            Command::Contour(a) => (a, commands::cmd_contour),
            Command::Voidtest(a) => (a, commands::cmd_voidtest),
        };
    let cfg = load(args)?;
    configure_workers(args.workers, cfg.run.workers)?;
    let out_dir = cfg.output_dir.clone();
    run_fn(&cfg, &out_dir)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
