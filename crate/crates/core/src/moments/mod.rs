//! Four-vectors, Eckart decomposition, equilibria and the corrected attractor.

pub mod attractor;
pub mod eckart;
pub mod equilibrium;
pub mod fourvector;
pub mod report;

pub use attractor::{
    build_attractor, conservation_residuals, sample_corrected, AttractorMode, AttractorParams, ConservationWeights,
};
pub use eckart::{compute_v_t, eckart_decompose, EckartState, FluxMoments};
pub use equilibrium::{
    build_equilibrium, reference_equilibrium, third_moment_contraction_check, AmplitudeMode, JuttnerParams,
    ThirdMomentReport,
};
pub use fourvector::{lorentz_boost_matrix, projector, FourVector, Tensor4, METRIC};
pub use report::{state_report, StateReport};
