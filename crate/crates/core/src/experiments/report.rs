//! Machine-readable run report: config hash, grid quality and named checks.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linear::LinearSetup;
use crate::moments::{build_equilibrium, compute_v_t, eckart_decompose, AmplitudeMode, FourVector};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One pass/fail comparison of a measured value against a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value <= bound`; NaN fails.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            comparison: Comparison::AtMost,
            bound,
            passed: value <= bound,
        }
    }

    /// Passes when `value >= bound`; NaN fails.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            comparison: Comparison::AtLeast,
            bound,
            passed: value >= bound,
        }
    }
}

/// Quality of the phase grid the run used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMetrics {
    pub n_per_axis: usize,
    pub n_energy: usize,
    pub p_max: f64,
    /// Deviation from the identity of the corrected basis Gram matrix.
    pub gram_max_dev: f64,
    /// Same for the continuum-normalized basis before correction.
    pub raw_gram_max_dev: f64,
    /// |n - 1| for the closed-form-amplitude reference equilibrium.
    pub zeroth_moment_error: f64,
    /// Equilibrium mass fraction beyond p_max.
    pub tail_fraction: f64,
}

impl GridMetrics {
    pub fn measure(setup: &LinearSetup) -> Result<Self> {
        let g = &setup.grid;
        let k = g.constants;
        let t0 = setup.reference.t0;
        let (_, cont) = build_equilibrium(g, 1.0, FourVector::rest(k.c), t0, AmplitudeMode::Continuum)?;
        let n = eckart_decompose(&compute_v_t(g, &cont)?, k.mc(), k.c)?.n;
        Ok(Self {
            n_per_axis: g.momentum.n_per_axis,
            n_energy: g.n_energy(),
            p_max: g.momentum.p_max,
            gram_max_dev: setup.basis.gram_deviation(g),
            raw_gram_max_dev: setup.basis.raw_gram_deviation(),
            zeroth_moment_error: (n - 1.0).abs(),
            tail_fraction: g.tail_fraction()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: String,
    pub config_hash: String,
    pub passed: bool,
    pub grid: GridMetrics,
    pub checks: Vec<Check>,
    /// Experiment-specific results.
    pub data: serde_json::Value,
}

impl Report {
    pub fn new(
        experiment: &str,
        config_hash: String,
        grid: GridMetrics,
        checks: Vec<Check>,
        data: serde_json::Value,
    ) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            experiment: experiment.to_string(),
            config_hash,
            passed: checks.iter().all(|c| c.passed),
            grid,
            checks,
            data,
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        assert!(!Check::at_most("x", f64::NAN, 1.0).passed);
        assert!(!Check::at_least("x", f64::NAN, 1.0).passed);
        assert!(Check::at_least("x", 2.0, 1.9).passed);
    }
}
