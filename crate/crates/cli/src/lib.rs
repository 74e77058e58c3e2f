//! Experiment runner for `wavebound`: seeded data generation, sweeps and
//! report emission. A run is a pure function of its configuration; the only
//! nondeterministic output, the wall-clock time, never reaches a file.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

use std::time::Instant;

pub use config::{Experiment, ExperimentConfig};
pub use error::{CliError, Result};
pub use experiments::sweep::convergence_sweep;
pub use report::{RunReport, Table, Verdict};

/// Resolve and validate the configuration, then compute every table without
/// touching the file system.
pub fn execute(config: ExperimentConfig) -> Result<RunReport> {
    let config = config.resolved()?;
    let start = Instant::now();
    let tables = match config.experiment {
        Experiment::Bekenstein => experiments::bekenstein::run(&config)?,
        Experiment::Gamma => experiments::gamma::run(&config)?,
        Experiment::Eigen => experiments::eigen::run(&config)?,
        Experiment::U1 => experiments::u1::run(&config)?,
        Experiment::Balance => experiments::balance::run(&config)?,
        Experiment::Qdec => experiments::qdec::run(&config)?,
        Experiment::Sweep => experiments::sweep::run(&config)?,
    };
    Ok(RunReport { config, tables, wall_clock: start.elapsed() })
}

/// [`execute`], then write the CSV tables and the JSON summary.
pub fn run(config: ExperimentConfig) -> Result<RunReport> {
    let report = execute(config)?;
    report.write()?;
    Ok(report)
}
