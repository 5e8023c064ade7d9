//! Strang-split time integration: half transport, full relaxation, half transport.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::DistributionField;
use crate::linear::LinearSetup;
use crate::moments::AttractorParams;
use crate::solver::config::{SolverConfig, StiffMode};
use crate::solver::diagnostics::{diagnose, DiagnosticsRecord};
use crate::solver::relax::{max_collision_rate, relax_step};
use crate::solver::transport::{cfl_limit, transport_step};

/// Owns the state of a run. A failed step leaves the last valid field in place.
pub struct Solver {
    field: DistributionField,
    config: SolverConfig,
    setup: Arc<LinearSetup>,
    warm: Vec<Option<AttractorParams>>,
    t: f64,
    step: usize,
    dt: f64,
    n_steps: usize,
}

/// Step size and count for a run: the largest stable dt (or the requested
/// one), shortened so that n_steps * dt = t_end.
pub fn plan_steps(field: &DistributionField, config: &SolverConfig) -> Result<(f64, usize)> {
    config.validate()?;
    let mut limit = if field.n_cells() > 1 {
        cfl_limit(field, config.cfl)
    } else {
        f64::INFINITY
    };
    if config.stiff_mode == StiffMode::ExplicitRk2 {
        limit = limit.min(0.5 / max_collision_rate(field)?);
    }
    let dt = match config.dt {
        Some(dt) if dt > limit * (1.0 + 1e-12) => return Err(Error::Cfl { dt, limit }),
        Some(dt) => dt,
        None if limit.is_finite() => limit,
        None => return Err(Error::Config("homogeneous implicit runs need an explicit dt".into())),
    };
    let n_steps = ((config.t_end / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    Ok((config.t_end / n_steps as f64, n_steps))
}

impl Solver {
    pub fn new(field: DistributionField, config: SolverConfig, setup: Arc<LinearSetup>) -> Result<Self> {
        if *setup.grid != *field.grid {
            return Err(Error::Shape("linear setup and field use different phase grids".into()));
        }
        field.check_finite()?;
        let (dt, n_steps) = plan_steps(&field, &config)?;
        let n = field.n_cells();
        let seed = setup.reference.attractor_seed(field.grid.constants.k_b);
        Ok(Self {
            field,
            config,
            setup,
            warm: vec![Some(seed); n],
            t: 0.0,
            step: 0,
            dt,
            n_steps,
        })
    }

    pub fn field(&self) -> &DistributionField {
        &self.field
    }

    pub fn into_field(self) -> DistributionField {
        self.field
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn steps_done(&self) -> usize {
        self.step
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn is_finished(&self) -> bool {
        self.step >= self.n_steps
    }

    /// Attractor parameters from the most recent relaxation of each cell.
    pub fn attractor_params(&self) -> &[Option<AttractorParams>] {
        &self.warm
    }

    pub fn diagnostics(&self) -> Result<DiagnosticsRecord> {
        diagnose(&self.field, &self.setup, self.t)
    }

    pub fn step(&mut self) -> Result<()> {
        let cfg = &self.config;
        let half = 0.5 * self.dt;
        let mut next = self.field.clone();
        let mut warm = self.warm.clone();
        transport_step(&mut next, half, cfg.scheme, cfg.cfl)?;
        relax_step(&mut next, self.dt, cfg.attractor_mode, cfg.stiff_mode, &mut warm)?;
        transport_step(&mut next, half, cfg.scheme, cfg.cfl)?;
        next.check_finite()?;
        self.field = next;
        self.warm = warm;
        self.step += 1;
        self.t = self.step as f64 * self.dt;
        Ok(())
    }

    /// Runs to t_end, recording diagnostics at t = 0, every `diag_every`
    /// steps and at the end. `after_step` sees the solver after every step.
    pub fn run<F>(&mut self, mut after_step: F) -> Result<Vec<DiagnosticsRecord>>
    where
        F: FnMut(&Solver) -> Result<()>,
    {
        let mut records = vec![self.diagnostics()?];
        while !self.is_finished() {
            self.step()?;
            if self.step % self.config.diag_every == 0 || self.is_finished() {
                records.push(self.diagnostics()?);
            }
            after_step(self)?;
        }
        Ok(records)
    }
}

pub struct EvolveOutput {
    pub field: DistributionField,
    pub records: Vec<DiagnosticsRecord>,
    pub dt: f64,
    pub steps: usize,
}

/// Integrates `f0` to `config.t_end`.
pub fn evolve(f0: DistributionField, config: SolverConfig, setup: Arc<LinearSetup>) -> Result<EvolveOutput> {
    let mut solver = Solver::new(f0, config, setup)?;
    let records = solver.run(|_| Ok(()))?;
    Ok(EvolveOutput {
        dt: solver.dt,
        steps: solver.step,
        field: solver.field,
        records,
    })
}
