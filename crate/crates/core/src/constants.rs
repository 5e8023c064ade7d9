use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light, particle rest mass, Boltzmann constant and relaxation time.
///
/// The default is the nondimensional system c = m = k_B = tau = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    pub c: f64,
    pub m: f64,
    pub k_b: f64,
    pub tau: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            c: 1.0,
            m: 1.0,
            k_b: 1.0,
            tau: 1.0,
        }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c", self.c), ("m", self.m), ("k_b", self.k_b), ("tau", self.tau)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("constant {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Rest energy m c^2.
    #[inline]
    pub fn rest_energy(&self) -> f64 {
        self.m * self.c * self.c
    }

    /// m c.
    #[inline]
    pub fn mc(&self) -> f64 {
        self.m * self.c
    }

    /// gamma = m c^2 / (k_B T).
    #[inline]
    pub fn gamma(&self, t: f64) -> f64 {
        self.rest_energy() / (self.k_b * t)
    }

    /// Thermal momentum width sqrt(m k_B T + (k_B T / c)^2).
    ///
    /// Reduces to sqrt(m k_B T) in the nonrelativistic regime and to k_B T / c
    /// in the ultrarelativistic one.
    pub fn thermal_momentum(&self, t: f64) -> f64 {
        let kt = self.k_b * t;
        (self.m * kt + (kt / self.c).powi(2)).sqrt()
    }
}
