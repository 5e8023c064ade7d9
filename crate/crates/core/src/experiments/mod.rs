//! Experiment drivers behind the command-line front end.
//!
//! Each driver turns an [`ExperimentConfig`] into a [`Report`] with named
//! pass/fail checks and, for time-dependent runs, a CSV time series.

pub mod config;
mod lab;
mod profiles;
pub mod report;
mod runs;
mod validate;

use std::path::{Path, PathBuf};
use std::sync::Arc;

pub use config::{DecayInitial, Experiment, ExperimentConfig, Profile, SCHEMA_VERSION};
pub use report::{Check, Comparison, GridMetrics, Report, REPORT_SCHEMA_VERSION};

use crate::error::{Error, Result};
use crate::grid::{snapshot, DistributionField, PhaseGrid};
use crate::linear::LinearSetup;

/// Exit status for a run that completed with failed checks.
pub const EXIT_TOLERANCE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
/// I/O and snapshot format problems.
pub const EXIT_IO: i32 = 1;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Domain(_) | Error::Shape(_) | Error::Cfl { .. } => EXIT_CONFIG,
        Error::Io(_) | Error::Snapshot(_) => EXIT_IO,
        e => {
            debug_assert!(e.is_numerical());
            EXIT_NUMERICAL
        }
    }
}

pub struct Outcome {
    pub report: Report,
    /// CSV text, present for time-dependent experiments.
    pub timeseries: Option<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed {
            0
        } else {
            EXIT_TOLERANCE
        }
    }
}

/// A run that stopped on an error, with the last state that passed a step.
pub struct Failure {
    pub error: Error,
    pub last_valid: Option<(DistributionField, f64)>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Self {
            error,
            last_valid: None,
        }
    }
}

/// Where periodic snapshots go, and the rescue slot filled on failure.
#[derive(Default)]
pub struct RunContext {
    pub snapshot_dir: Option<PathBuf>,
    last_valid: Option<(DistributionField, f64)>,
}

impl RunContext {
    pub fn with_snapshots(dir: impl Into<PathBuf>) -> Self {
        Self {
            snapshot_dir: Some(dir.into()),
            last_valid: None,
        }
    }

    pub(crate) fn write_snapshot(&self, step: usize, field: &DistributionField, t: f64) -> Result<()> {
        if let Some(dir) = &self.snapshot_dir {
            std::fs::create_dir_all(dir)?;
            snapshot::save(&dir.join(format!("snapshot_{step:07}.bin")), field, t)?;
        }
        Ok(())
    }

    pub(crate) fn rescue(&mut self, field: &DistributionField, t: f64) {
        self.last_valid = Some((field.clone(), t));
    }
}

/// Runs the configured experiment.
pub fn run(cfg: &ExperimentConfig, ctx: &mut RunContext) -> std::result::Result<Outcome, Failure> {
    let result = cfg.validate().and_then(|_| match &cfg.experiment {
        Experiment::ValidateMoments => validate::validate_moments(cfg),
        Experiment::ValidateBessel => validate::validate_bessel(cfg),
        Experiment::Relax { amplitude, profile } => runs::relax(cfg, *amplitude, *profile, ctx),
        Experiment::Evolve {
            amplitude,
            mode,
            anisotropy,
        } => runs::evolve(cfg, *amplitude, *mode, *anisotropy, ctx),
        Experiment::LinearLab { samples, amplitude } => lab::linear_lab(cfg, *samples, *amplitude),
        Experiment::DecayStudy {
            amplitude,
            initial,
            mode,
            windows,
        } => runs::decay_study(cfg, *amplitude, *initial, *mode, *windows, ctx),
    });
    result.map_err(|error| Failure {
        error,
        last_valid: ctx.last_valid.take(),
    })
}

/// Writes report.json and, when present, timeseries.csv into `dir`.
pub fn write_outputs(outcome: &Outcome, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), outcome.report.to_json())?;
    if let Some(csv) = &outcome.timeseries {
        std::fs::write(dir.join("timeseries.csv"), csv)?;
    }
    Ok(())
}

pub(crate) fn build_setup(cfg: &ExperimentConfig) -> Result<Arc<LinearSetup>> {
    let t0 = cfg.reference_temperature;
    let grid = PhaseGrid::new(cfg.constants, cfg.density, &cfg.grid, t0)?;
    Ok(Arc::new(LinearSetup::new(Arc::new(grid), t0)?))
}

pub(crate) fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report data serializes")
}
