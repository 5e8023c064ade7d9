use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary treatment of the slab.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Periodic,
}

/// Uniform one-dimensional mesh of a periodic slab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialMesh {
    pub n_cells: usize,
    pub length: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl Default for SpatialMesh {
    fn default() -> Self {
        Self {
            n_cells: 1,
            length: 1.0,
            boundary: Boundary::Periodic,
        }
    }
}

impl SpatialMesh {
    pub fn new(n_cells: usize, length: f64) -> Result<Self> {
        let m = Self {
            n_cells,
            length,
            boundary: Boundary::Periodic,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cells == 0 {
            return Err(Error::Config("mesh needs at least one cell".into()));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::Config(format!("mesh length must be positive, got {}", self.length)));
        }
        Ok(())
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.length / self.n_cells as f64
    }

    /// Cell-centre coordinate.
    #[inline]
    pub fn center(&self, cell: usize) -> f64 {
        (cell as f64 + 0.5) * self.dx()
    }
}
