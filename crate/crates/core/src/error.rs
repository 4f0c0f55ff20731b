//! Error type shared by the solver library and the benchmark drivers.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A thermodynamic state is non-physical (non-positive density or pressure).
    #[error("non-physical state: {0}")]
    InvalidState(String),

    /// Riemann data generates vacuum; no star state exists.
    #[error("vacuum-generating data: u_R - u_L = {velocity_gap} >= {pressure_positivity_limit}")]
    Vacuum {
        velocity_gap: f64,
        pressure_positivity_limit: f64,
    },

    /// An iterative solve exhausted its iteration budget.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// Positivity of density or pressure was lost and could not be recovered
    /// by time-step halving.
    #[error("positivity lost at step {step}, t = {time}: {detail}")]
    PositivityAbort {
        step: usize,
        time: f64,
        detail: String,
    },

    /// Non-finite degrees of freedom or unbounded norm growth.
    #[error("solution blew up at step {step}, t = {time}")]
    Blowup { step: usize, time: f64 },

    /// Malformed run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line harness.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) => 2,
            Error::Blowup { .. } => 3,
            Error::PositivityAbort { .. } => 4,
            _ => 1,
        }
    }
}
