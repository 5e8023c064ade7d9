//! Time integration of the kinetic equation in a periodic slab.

pub mod config;
pub mod diagnostics;
pub mod evolve;
pub mod relax;
pub mod transport;

pub use config::{Scheme, SolverConfig, StiffMode};
pub use diagnostics::{diagnose, write_csv, DiagnosticsRecord, CSV_HEADER};
pub use evolve::{evolve, plan_steps, EvolveOutput, Solver};
pub use relax::{collision_rate, relax_step, relaxation_rhs};
pub use transport::{cfl_limit, transport_rhs, transport_step};
