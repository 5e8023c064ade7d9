//! Discrete-velocity solver and diagnostics for the relativistic BGK model
//! of a polyatomic gas.

pub mod constants;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod linear;
pub mod moments;
pub mod solver;
pub mod special;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
