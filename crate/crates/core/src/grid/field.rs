use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::mesh::SpatialMesh;
use crate::grid::phase::PhaseGrid;

/// F sampled on mesh x phase grid, stored as ((cell * Np + j) * Ne + k).
///
/// Negative entries are allowed; only non-finite ones are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionField {
    pub grid: Arc<PhaseGrid>,
    pub mesh: SpatialMesh,
    pub values: Vec<f64>,
}

impl DistributionField {
    pub fn zeros(grid: Arc<PhaseGrid>, mesh: SpatialMesh) -> Self {
        let len = mesh.n_cells * grid.cell_len();
        Self {
            grid,
            mesh,
            values: vec![0.0; len],
        }
    }

    pub fn from_values(grid: Arc<PhaseGrid>, mesh: SpatialMesh, values: Vec<f64>) -> Result<Self> {
        let want = mesh.n_cells * grid.cell_len();
        if values.len() != want {
            return Err(Error::Shape(format!("field has {} values, expected {want}", values.len())));
        }
        let f = Self { grid, mesh, values };
        f.check_finite()?;
        Ok(f)
    }

    /// Every cell set to the same per-cell profile.
    pub fn uniform(grid: Arc<PhaseGrid>, mesh: SpatialMesh, cell: &[f64]) -> Result<Self> {
        if cell.len() != grid.cell_len() {
            return Err(Error::Shape(format!(
                "cell profile has {} values, expected {}",
                cell.len(),
                grid.cell_len()
            )));
        }
        let values = cell.repeat(mesh.n_cells);
        Self::from_values(grid, mesh, values)
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.mesh.n_cells
    }

    #[inline]
    pub fn cell(&self, c: usize) -> &[f64] {
        let n = self.grid.cell_len();
        &self.values[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn cell_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.grid.cell_len();
        &mut self.values[c * n..(c + 1) * n]
    }

    pub fn check_finite(&self) -> Result<()> {
        if let Some(pos) = self.values.iter().position(|v| !v.is_finite()) {
            let n = self.grid.cell_len();
            return Err(Error::NonFinite(format!(
                "field entry {pos} (cell {}) is {}",
                pos / n,
                self.values[pos]
            )));
        }
        Ok(())
    }

    /// Applies `f` to every cell in parallel; results come back in cell order.
    pub fn map_cells<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &[f64]) -> T + Sync + Send,
    {
        self.values
            .par_chunks(self.grid.cell_len())
            .enumerate()
            .map(|(c, v)| f(c, v))
            .collect()
    }

    pub fn same_shape(&self, other: &DistributionField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }
}
