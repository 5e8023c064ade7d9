//! Special functions and equilibrium thermodynamics.

pub mod bessel;
pub mod density;
pub mod laguerre;
pub mod quadrature;
pub mod thermo;

pub use bessel::{bessel_k, bessel_k_scaled};
pub use density::{GammaPair, StateDensity};
pub use quadrature::QuadOptions;
pub use thermo::{BesselWeight, Inversion, Thermodynamics};
