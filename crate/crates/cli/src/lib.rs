//! Experiment harness around the `kgmp` library: TOML configs, the six
//! subcommands, and deterministic CSV/JSON output.

use kgmp::KgmpError;
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod output;

pub use commands::Outcome;
pub use config::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    ConfigError,
    SolverFailure,
    Refused,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::ConfigError => 2,
            ExitStatus::SolverFailure => 3,
            ExitStatus::Refused => 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("solver failure: {0}")]
    Solver(KgmpError),
}

impl From<KgmpError> for CliError {
    fn from(e: KgmpError) -> Self {
        match e {
            KgmpError::HypothesisViolated(msg) => CliError::Refused(format!("outside theorem hypotheses: {msg}")),
            KgmpError::InvalidParams(_) => CliError::Config(e.to_string()),
            other => CliError::Solver(other),
        }
    }
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Config(_) => ExitStatus::ConfigError,
            CliError::Refused(_) => ExitStatus::Refused,
            CliError::Solver(_) => ExitStatus::SolverFailure,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Sweep,
    PhaseRatio,
    AubinScan,
    Pohozaev,
    GaugeCheck,
}

pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Solve => commands::run_solve(cfg),
        Command::Sweep => commands::run_sweep(cfg),
        Command::PhaseRatio => commands::run_phase_ratio(cfg),
        Command::AubinScan => commands::run_aubin_scan(cfg),
        Command::Pohozaev => commands::run_pohozaev(cfg),
        Command::GaugeCheck => commands::run_gauge_check(cfg),
    }
}
