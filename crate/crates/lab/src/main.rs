//! `bosegas-lab`: command-line front end.
//!
//! Exit status: 0 success, 1 configuration error, 2 numerical or output
//! failure, 3 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use bosegas_lab::runner;
use bosegas_lab::{ExperimentConfig, LabResult};
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "bosegas-lab", version, about = "Many-body vs NLS experiments for 1D bosons")]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (overrides the config).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Random seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// NLS trajectory of the configured datum.
    NlsRun,
    /// Paired many-body/NLS run at each configured N.
    ManybodyRun,
    /// Sweep over N with order fits at the probe time.
    SweepN,
    /// Sweep over eps at fixed N with order fits and successive differences.
    SweepEps,
    /// Rough-datum pipeline with a mollified many-body initial state.
    TheoremL,
    /// Oracle, projector and density-matrix verification suites.
    Verify,
}

fn load(cli: &Cli) -> LabResult<ExperimentConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| bosegas_lab::LabError::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(out) = &cli.out {
        cfg.output = out.clone();
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> LabResult<()> {
    let cfg = load(cli)?;
    match cli.command {
        Command::NlsRun => {
            let a = runner::nls_run(&cfg)?;
            println!("{}", a.csv.display());
        }
        Command::ManybodyRun => println!("{}", runner::manybody_run(&cfg)?.artifacts.csv.display()),
        Command::SweepN => println!("{}", runner::sweep_n(&cfg)?.artifacts.csv.display()),
        Command::SweepEps => println!("{}", runner::sweep_eps(&cfg)?.artifacts.csv.display()),
        Command::TheoremL => println!("{}", runner::theorem_l(&cfg)?.artifacts.csv.display()),
        Command::Verify => {
            runner::verify(&cfg)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
