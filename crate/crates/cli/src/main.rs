//! `sta` — experiment runner for the three-level shortcut engine.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 numeric failure.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use commands::AppError;
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "sta",
    about = "Shortcut drives for three-level population transfer",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Configuration file (`key = value` lines, `#` comments)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key (repeatable), e.g. --set tau=0.1
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed override
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweeps and Monte Carlo (0 = default pool)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one transfer run and write trajectory + summary
    Simulate(CommonOpts),
    /// Reproduce one of the bundled figure datasets (1..=8)
    Figure {
        /// Figure number
        n: u8,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Monte Carlo robustness batch under drive fluctuations
    NoiseMc(CommonOpts),
}

fn build_config(opts: &CommonOpts) -> Result<RunConfig, AppError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &opts.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;
        cfg.apply_file(&text).map_err(|e| AppError::Config(e.0))?;
    }
    for s in &opts.sets {
        cfg.apply_set(s).map_err(|e| AppError::Config(e.0))?;
    }
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<(), AppError> {
    let (opts, figure) = match &cli.command {
        Command::Simulate(opts) => (opts, None),
        Command::Figure { n, opts } => (opts, Some(*n)),
        Command::NoiseMc(opts) => (opts, None),
    };
    let cfg = build_config(opts)?;
    let out = opts
        .out
        .clone()
        .unwrap_or_else(|| commands::default_out_dir("run"));
    let jobs = (opts.jobs > 0).then_some(opts.jobs);
    eprintln!("sta: {}", commands::format_run_banner(&cfg));
    sta_core::par::with_jobs(jobs, move || match (&cli.command, figure) {
        (Command::Simulate(_), _) => commands::run_simulate(&cfg, &out),
        (Command::Figure { .. }, Some(n)) => commands::run_figure(n, &cfg, &out),
        (Command::NoiseMc(_), _) => commands::run_noise_mc(&cfg, &out),
        _ => unreachable!(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sta: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
