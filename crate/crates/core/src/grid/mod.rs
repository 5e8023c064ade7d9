//! Discrete phase space: momentum grid, internal-energy rule, spatial mesh
//! and the distribution field living on them.

pub mod energy;
pub mod field;
pub mod mesh;
pub mod momentum;
pub mod phase;
pub mod reduce;
pub mod snapshot;

pub use energy::EnergyQuadrature;
pub use field::DistributionField;
pub use mesh::{Boundary, SpatialMesh};
pub use momentum::MomentumGrid;
pub use phase::{GridSpec, PhaseGrid};
