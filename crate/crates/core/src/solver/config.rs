use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::AttractorMode;

/// Spatial reconstruction of the transport step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// First-order upwind with forward Euler.
    ExplicitUpwind1,
    /// Van Leer limited slopes with two-stage SSP Runge-Kutta.
    #[default]
    Muscl2,
}

/// Integrator for the relaxation substep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StiffMode {
    /// Heun's method, rebuilding the attractor at both stages.
    ExplicitRk2,
    /// Exact exponential update toward a frozen attractor.
    #[default]
    ImplicitRelaxation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub t_end: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub stiff_mode: StiffMode,
    #[serde(default = "default_diag_every")]
    pub diag_every: usize,
    /// Requested step; shortened so that t_end is hit exactly. Must respect
    /// the stability bounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default)]
    pub attractor_mode: AttractorMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_every: Option<usize>,
}

fn default_cfl() -> f64 {
    0.5
}

fn default_diag_every() -> usize {
    10
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: default_cfl(),
            t_end: 1.0,
            scheme: Scheme::default(),
            stiff_mode: StiffMode::default(),
            diag_every: default_diag_every(),
            dt: None,
            attractor_mode: AttractorMode::default(),
            snapshot_every: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.diag_every == 0 {
            return Err(Error::Config("diag_every must be at least 1".into()));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Config(format!("dt must be positive, got {dt}")));
            }
        }
        if self.snapshot_every == Some(0) {
            return Err(Error::Config("snapshot_every must be at least 1".into()));
        }
        Ok(())
    }
}
