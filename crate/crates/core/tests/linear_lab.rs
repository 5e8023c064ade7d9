//! Linearized structure on whole fields: balance laws along a solver run.

use std::sync::Arc;

use relbgk::grid::{DistributionField, GridSpec, PhaseGrid, SpatialMesh};
use relbgk::linear::{balance_residuals, LinearSetup};
use relbgk::moments::AttractorMode;
use relbgk::solver::{Scheme, Solver, SolverConfig};
use relbgk::special::StateDensity;
use relbgk::PhysicalConstants;

const T0: f64 = 0.1;

fn coarse_setup() -> Arc<LinearSetup> {
    let spec = GridSpec {
        n_per_axis: 8,
        n_energy: 4,
        ..GridSpec::default()
    };
    let g = PhaseGrid::new(PhysicalConstants::default(), StateDensity::default(), &spec, T0).unwrap();
    Arc::new(LinearSetup::new(Arc::new(g), T0).unwrap())
}

fn sinusoid(setup: &LinearSetup, n_cells: usize, amp: f64) -> DistributionField {
    let mesh = SpatialMesh::new(n_cells, 1.0).unwrap();
    let r = &setup.reference;
    let mut values = Vec::with_capacity(n_cells * r.f0.len());
    for c in 0..n_cells {
        let s = amp * (2.0 * std::f64::consts::PI * mesh.center(c)).sin();
        values.extend(r.f0.iter().map(|f| f * (1.0 + s)));
    }
    DistributionField::from_values(setup.grid.clone(), mesh, values).unwrap()
}

// Residuals between the snapshots bracketing t = t_probe.
fn residuals_at(setup: &Arc<LinearSetup>, n_cells: usize, dt: f64, t_probe: f64) -> [f64; 3] {
    let steps = (t_probe / dt).round() as usize;
    let config = SolverConfig {
        t_end: dt * (steps + 1) as f64,
        dt: Some(dt),
        ..SolverConfig::default()
    };
    let mut solver = Solver::new(sinusoid(setup, n_cells, 1e-4), config, setup.clone()).unwrap();
    for _ in 0..steps {
        solver.step().unwrap();
    }
    let before = solver.field().clone();
    solver.step().unwrap();
    balance_residuals(setup, &before, solver.field(), solver.dt(), AttractorMode::DiscreteExact, Scheme::Muscl2)
        .unwrap()
        .residuals
}

#[test]
fn acoustic_balance_residuals_shrink_under_refinement() {
    let setup = coarse_setup();
    let coarse = residuals_at(&setup, 64, 1e-3, 0.02);
    let fine = residuals_at(&setup, 128, 2.5e-4, 0.02);
    for q in 0..3 {
        assert!(coarse[q] <= 1e-6, "law {q}: {coarse:?}");
        assert!(fine[q] * 4.0 <= coarse[q], "law {q}: {coarse:?} -> {fine:?}");
    }
}

