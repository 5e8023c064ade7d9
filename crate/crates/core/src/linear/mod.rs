//! Linearized structure around the global equilibrium: projection onto the
//! collision invariants, L = P - I, the nonlinear remainder and the macro
//! balance laws.

pub mod balance;
pub mod basis;
pub mod remainder;

pub use balance::{balance_coefficients, balance_residuals, BalanceCoefficients, BalanceReport};
pub use basis::{inner, BasisSet, LinearSetup, MacroCoefficients, Reference};
pub use remainder::{
    box_gamma_projection, dissipativity_residual, gamma_remainder, psi_phi, pythagoras_residual, quadratic_profile,
    quadratic_ratio, scaled_rhs, PsiPhi,
};
