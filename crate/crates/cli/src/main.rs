use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kgmp_cli::{run, CliError, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "kgmp", version, about = "Radial experiments for the electrostatic Klein-Gordon-Maxwell-Proca system")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override the number of grid intervals.
    #[arg(long = "grid-n", global = true)]
    grid_n: Option<usize>,
    /// Override the grid grading exponent.
    #[arg(long, global = true)]
    grading: Option<f64>,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Mountain-pass solve followed by Newton refinement.
    Solve,
    /// Solves over a range of phases omega.
    Sweep,
    /// Phase-compensation ratio of bubbles.
    PhaseRatio,
    /// Aubin test-function quotients against 1/K_n^2.
    AubinScan,
    /// Pohozaev terms over exact sphere solutions.
    Pohozaev,
    /// Gauge bounds and continuity on random fields.
    GaugeCheck,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Solve => Command::Solve,
            Sub::Sweep => Command::Sweep,
            Sub::PhaseRatio => Command::PhaseRatio,
            Sub::AubinScan => Command::AubinScan,
            Sub::Pohozaev => Command::Pohozaev,
            Sub::GaugeCheck => Command::GaugeCheck,
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::from_toml("")?,
    };
    let cfg = cfg.with_grid(cli.grid_n, cli.grading)?;
    let outcome = run(cli.command.into(), &cfg)?;
    outcome.artifacts.write_to(&cli.out)?;
    if !cli.quiet {
        for line in &outcome.summary {
            println!("{line}");
        }
        for (name, _) in &outcome.artifacts.files {
            println!("wrote {}", cli.out.join(name).display());
        }
    }
    Ok(outcome.status.code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status().code() as u8)
        }
    }
}
