//! Discrete internal-energy measure phi(I) dI.

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::special::laguerre::LaguerreRule;
use crate::special::StateDensity;

/// Ratio between the Laguerre variable and I / kT_ref. Values above one place
/// more nodes in the thermal range; 2.5 was tuned on the zeroth to second
/// equilibrium moments.
pub const LAGUERRE_STRETCH: f64 = 2.5;

/// Nodes I_k and weights approximating the measure phi(I) dI.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl EnergyQuadrature {
    /// Generalized Gauss-Laguerre rule in x = stretch * I / (k_B T_ref).
    ///
    /// The weight x^alpha e^{-x} carries the power-law factor of phi exactly;
    /// e^{x} rho(I) is folded into the stored weights.
    pub fn laguerre(
        count: usize,
        density: &StateDensity,
        constants: &PhysicalConstants,
        t_ref: f64,
    ) -> Result<Self> {
        if count < 2 {
            return Err(Error::Config(format!(
                "n_energy must be at least 2, got {count}; a single node cannot resolve the internal mode"
            )));
        }
        density.validate()?;
        if !(t_ref.is_finite() && t_ref > 0.0) {
            return Err(Error::Config(format!("reference temperature must be positive, got {t_ref}")));
        }
        let alpha = density.alpha();
        let rule = LaguerreRule::new(count, alpha)?;
        let s = constants.k_b * t_ref / LAGUERRE_STRETCH;
        let ln_s = (alpha + 1.0) * s.ln();
        let mut nodes = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for (&x, &lw) in rule.nodes.iter().zip(&rule.ln_weights) {
            let i = s * x;
            nodes.push(i);
            weights.push((lw + x + ln_s).exp() * density.rho(i, constants));
        }
        Self::from_parts(nodes, weights)
    }

    /// Validates externally supplied nodes and weights.
    pub fn from_parts(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::Shape(format!(
                "{} energy nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.iter().any(|&x| !(x.is_finite() && x >= 0.0))
            || nodes.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::Config("energy nodes must be finite, nonnegative and strictly increasing".into()));
        }
        if weights.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(Error::Config("energy weights must be finite and positive".into()));
        }
        Ok(Self { nodes, weights })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
