use thiserror::Error;

/// Errors produced by the numerical kernels and the physics layers above them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{routine} failed to converge after {iterations} iterations")]
    Convergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("ground state overlap vanished between lambda={lambda_a} and lambda={lambda_b}")]
    DegenerateCrossing { lambda_a: f64, lambda_b: f64 },

    #[error("ground state is quasi-degenerate (gap {gap:e}); perturbative sum undefined")]
    Degenerate { gap: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("cannot classify weight profile: {0}")]
    Classification(String),

    #[error("log of zero distance |lambda_max - lambda_star| at N={n}")]
    DegenerateLog { n: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
