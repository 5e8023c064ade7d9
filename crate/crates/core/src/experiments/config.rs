//! Experiment configuration: a versioned TOML document with no unknown keys.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, SpatialMesh};
use crate::solver::SolverConfig;
use crate::special::StateDensity;

pub const SCHEMA_VERSION: u32 = 1;

/// Momentum profile of a homogeneous perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Even in p: pressure anisotropy only.
    #[default]
    Anisotropic,
    /// Anisotropy plus a part odd in p^1 carrying heat flux.
    AnisotropicHeat,
}

/// Initial data of a decay study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayInitial {
    /// Uniform density offset plus a density sinusoid and a small micro part.
    #[default]
    MacroSinusoid,
    /// (I - P) of a smooth profile, modulated in x.
    PureMicro,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    ValidateMoments,
    ValidateBessel,
    Relax {
        amplitude: f64,
        #[serde(default)]
        profile: Profile,
    },
    Evolve {
        /// Relative amplitude of the density sinusoid.
        amplitude: f64,
        #[serde(default = "one")]
        mode: usize,
        /// Pressure-anisotropy amplitude relative to `amplitude`.
        #[serde(default = "default_anisotropy")]
        anisotropy: f64,
    },
    LinearLab {
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_lab_amplitude")]
        amplitude: f64,
    },
    DecayStudy {
        amplitude: f64,
        #[serde(default)]
        initial: DecayInitial,
        #[serde(default = "one")]
        mode: usize,
        /// Number of equal fit windows over the run.
        #[serde(default = "default_windows")]
        windows: usize,
    },
}

fn one() -> usize {
    1
}

fn default_anisotropy() -> f64 {
    1.0
}

fn default_samples() -> usize {
    50
}

fn default_lab_amplitude() -> f64 {
    0.02
}

fn default_windows() -> usize {
    4
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::ValidateMoments => "validate_moments",
            Experiment::ValidateBessel => "validate_bessel",
            Experiment::Relax { .. } => "relax",
            Experiment::Evolve { .. } => "evolve",
            Experiment::LinearLab { .. } => "linear_lab",
            Experiment::DecayStudy { .. } => "decay_study",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub constants: PhysicalConstants,
    pub density: StateDensity,
    /// T0 of the global equilibrium F_E^0 and of the grid sizing.
    pub reference_temperature: f64,
    pub grid: GridSpec,
    pub mesh: SpatialMesh,
    pub solver: SolverConfig,
    pub experiment: Experiment,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn parse_scalar(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match wrapped.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

/// Sets a dotted key in a TOML table, creating intermediate tables.
fn apply_override(doc: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{spec}` is not of the form key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("override key `{key}` is malformed")));
    }
    let mut table = doc;
    for part in &path[..path.len() - 1] {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override `{key}`: `{part}` is not a table")))?;
    }
    table.insert(path[path.len() - 1].to_string(), parse_scalar(raw.trim()));
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: Self = doc.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text, overrides)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.constants.validate()?;
        self.density.validate()?;
        self.mesh.validate()?;
        self.solver.validate()?;
        let t0 = self.reference_temperature;
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(Error::Config(format!("reference_temperature must be positive, got {t0}")));
        }
        if self.grid.n_energy < 2 {
            return Err(Error::Config(format!(
                "n_energy = {} cannot resolve the internal-energy moments; use at least 2",
                self.grid.n_energy
            )));
        }
        match self.experiment {
            Experiment::Relax { amplitude, .. } if !(0.0..1.0).contains(&amplitude) => {
                return Err(Error::Config(format!("relax amplitude must lie in [0, 1), got {amplitude}")));
            }
            Experiment::Evolve {
                amplitude,
                mode,
                anisotropy,
            } if !(0.0..1.0).contains(&amplitude)
                || mode == 0
                || !(anisotropy >= 0.0 && anisotropy * amplitude < 1.0) =>
            {
                return Err(Error::Config(
                    "evolve needs amplitude in [0, 1), mode >= 1 and 0 <= anisotropy * amplitude < 1".into(),
                ));
            }
            Experiment::LinearLab { samples, amplitude } if samples == 0 || !(amplitude > 0.0) => {
                return Err(Error::Config("linear_lab needs samples >= 1 and a positive amplitude".into()));
            }
            Experiment::DecayStudy {
                amplitude,
                mode,
                windows,
                ..
            } if !(0.0..=0.05).contains(&amplitude) || mode == 0 || windows == 0 => {
                return Err(Error::Config(
                    "decay_study needs amplitude in [0, 0.05], mode >= 1 and windows >= 1".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }

    /// Canonical TOML rendering of the resolved configuration.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the canonical rendering, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
