use thiserror::Error;

/// Failures surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument outside supported domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimated error {estimate:e} exceeds tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("closed-form and quadrature evaluations disagree at T = {temperature}: relative difference {difference:e}")]
    PathDisagreement { temperature: f64, difference: f64 },

    #[error("temperature inversion failed: {0}")]
    Inversion(String),

    #[error("particle flux is not timelike (V.V = {0:e})")]
    NotTimelike(f64),

    #[error("attractor construction failed in cell {cell}: {reason}")]
    Attractor { cell: usize, reason: String },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("time step {dt:e} exceeds stability bound {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    #[error("non-finite value produced: {0}")]
    NonFinite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by the numerics rather than by the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::PathDisagreement { .. }
                | Error::Inversion(_)
                | Error::NotTimelike(_)
                | Error::Attractor { .. }
                | Error::Singular(_)
                | Error::NonFinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
