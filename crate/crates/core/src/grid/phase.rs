//! Momentum grid and energy quadrature combined, with the reduction primitive.

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::grid::energy::EnergyQuadrature;
use crate::grid::momentum::MomentumGrid;
use crate::grid::reduce::NeumaierN;
use crate::special::quadrature::{integrate_semi_infinite, QuadOptions};
use crate::special::StateDensity;

/// Largest admissible equilibrium mass fraction outside |p| = p_max.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Resolution of the phase grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_per_axis: usize,
    pub n_energy: usize,
    /// p_max in units of the thermal momentum at the reference temperature.
    #[serde(default = "default_widths")]
    pub p_max_widths: f64,
    /// Explicit p_max; overrides `p_max_widths` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<f64>,
}

fn default_widths() -> f64 {
    12.0
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_per_axis: 32,
            n_energy: 24,
            p_max_widths: default_widths(),
            p_max: None,
        }
    }
}

impl GridSpec {
    pub fn resolved_p_max(&self, constants: &PhysicalConstants, t_ref: f64) -> f64 {
        self.p_max
            .unwrap_or(self.p_max_widths * constants.thermal_momentum(t_ref))
    }

    /// Halved momentum spacing and doubled energy count at the same p_max.
    pub fn refined(&self, constants: &PhysicalConstants, t_ref: f64) -> Self {
        Self {
            n_per_axis: 2 * self.n_per_axis,
            n_energy: 2 * self.n_energy,
            p_max_widths: self.p_max_widths,
            p_max: Some(self.resolved_p_max(constants, t_ref)),
        }
    }
}

/// Discrete phase space (p, I) with precomputed per-node factors.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub constants: PhysicalConstants,
    pub density: StateDensity,
    pub t_ref: f64,
    pub momentum: MomentumGrid,
    pub energy: EnergyQuadrature,
    /// W_k = 1 + I_k / m c^2.
    pub w_int: Vec<f64>,
    /// Combined quadrature weight (dp)^3 * w_k for energy node k.
    pub w_total: Vec<f64>,
}

impl PhaseGrid {
    pub fn new(
        constants: PhysicalConstants,
        density: StateDensity,
        spec: &GridSpec,
        t_ref: f64,
    ) -> Result<Self> {
        constants.validate()?;
        density.validate()?;
        let p_max = spec.resolved_p_max(&constants, t_ref);
        let momentum = MomentumGrid::new(p_max, spec.n_per_axis, &constants)?;
        let energy = EnergyQuadrature::laguerre(spec.n_energy, &density, &constants, t_ref)?;
        let grid = Self::from_parts(constants, density, t_ref, momentum, energy);
        let tail = grid.tail_fraction()?;
        if tail > TAIL_TOLERANCE {
            return Err(Error::Config(format!(
                "p_max = {p_max} truncates {tail:e} of the reference equilibrium (limit {TAIL_TOLERANCE:e})"
            )));
        }
        Ok(grid)
    }

    pub fn from_parts(
        constants: PhysicalConstants,
        density: StateDensity,
        t_ref: f64,
        momentum: MomentumGrid,
        energy: EnergyQuadrature,
    ) -> Self {
        let mc2 = constants.rest_energy();
        let w_int = energy.nodes.iter().map(|&i| 1.0 + i / mc2).collect();
        let vol = momentum.cell_volume();
        let w_total = energy.weights.iter().map(|&w| vol * w).collect();
        Self {
            constants,
            density,
            t_ref,
            momentum,
            energy,
            w_int,
            w_total,
        }
    }

    #[inline]
    pub fn n_momentum(&self) -> usize {
        self.momentum.len()
    }

    #[inline]
    pub fn n_energy(&self) -> usize {
        self.energy.len()
    }

    /// Values per spatial cell.
    #[inline]
    pub fn cell_len(&self) -> usize {
        self.n_momentum() * self.n_energy()
    }

    #[inline]
    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.n_energy() + k
    }

    /// Weighted sum of f(j, k) over phase space.
    ///
    /// Fixed order: energy node outermost, then momentum nodes paired with
    /// their mirrors in lexicographic order, accumulated with Neumaier
    /// compensation. Terms that are odd in p cancel within each pair before
    /// they reach the accumulator, so odd moments of even data are exactly 0.
    pub fn sum<const N: usize, F>(&self, f: F) -> [f64; N]
    where
        F: Fn(usize, usize) -> [f64; N],
    {
        let np = self.n_momentum();
        let mut acc = NeumaierN::<N>::default();
        for k in 0..self.n_energy() {
            let w = self.w_total[k];
            for j in 0..np / 2 {
                let a = f(j, k);
                let b = f(np - 1 - j, k);
                let s: [f64; N] = std::array::from_fn(|c| a[c] + b[c]);
                acc.add_scaled(w, &s);
            }
        }
        acc.value()
    }

    /// Integral of F(p, I) weight(p, p0, I) phi(I) dI dp for one cell.
    pub fn integrate<const N: usize, F>(&self, values: &[f64], weight: F) -> Result<[f64; N]>
    where
        F: Fn(&[f64; 3], f64, f64) -> [f64; N],
    {
        if values.len() != self.cell_len() {
            return Err(Error::Shape(format!(
                "cell slice has {} values, grid expects {}",
                values.len(),
                self.cell_len()
            )));
        }
        let m = &self.momentum;
        let e = &self.energy;
        Ok(self.sum(|j, k| {
            let fv = values[self.index(j, k)];
            let w = weight(&m.nodes[j], m.p0[j], e.nodes[k]);
            std::array::from_fn(|c| fv * w[c])
        }))
    }

    /// Mass fraction of the rest equilibrium at t_ref outside |p| = p_max,
    /// using the discrete energy rule and adaptive radial integrals.
    pub fn tail_fraction(&self) -> Result<f64> {
        let k = &self.constants;
        let gamma = k.gamma(self.t_ref);
        let kt = k.k_b * self.t_ref;
        let r_max = self.momentum.p_max / k.mc();
        let opts = QuadOptions::relative(1e-10);
        let mut tail = 0.0;
        let mut full = 0.0;
        for (idx, (&i, &w)) in self.energy.nodes.iter().zip(&self.energy.weights).enumerate() {
            let g = gamma * self.w_int[idx];
            let radial = |r: f64| {
                let x = (1.0 + r * r).sqrt();
                [r * r * (-g * r * r / (1.0 + x)).exp()]
            };
            let f = integrate_semi_infinite(radial, 0.0, (1.0 / g).max(1.0 / g.sqrt()), opts)?[0];
            let xm = (1.0 + r_max * r_max).sqrt();
            let t = integrate_semi_infinite(radial, r_max, xm / (g * r_max), opts)?[0];
            let s = w * (-i / kt).exp();
            tail += s * t;
            full += s * f;
        }
        Ok(tail / full)
    }
}
