use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulator, analysis or I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("Hamiltonian is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("steady state is degenerate: null space has dimension {nullity}")]
    DegenerateSteadyState { nullity: usize },

    #[error("numerical failure in {context}: residual {residual:e}")]
    Numerical { context: String, residual: f64 },

    #[error("time step {dt:e} µs exceeds stability limit {limit:e} µs")]
    StepSize { dt: f64, limit: f64 },

    #[error("invariant breach at step {step}: {what} drift {drift:e}")]
    InvariantBreach {
        step: usize,
        what: &'static str,
        drift: f64,
    },

    #[error("detuning grid is not uniform (max deviation {deviation:e} rad/µs)")]
    NonUniformGrid { deviation: f64 },

    #[error("reference spectrum has zero peak transmission")]
    UndrivenReference,

    #[error("sweep point δ = {delta_mhz} MHz: {source}")]
    AtDetuning {
        delta_mhz: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("scenario `{scenario}`: {source}")]
    InScenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    ///
    /// The CLI maps these to exit code 2 and everything else to 1.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::DegenerateSteadyState { .. }
            | Error::Numerical { .. }
            | Error::InvariantBreach { .. }
            | Error::UndrivenReference => true,
            Error::AtDetuning { source, .. } | Error::InScenario { source, .. } => {
                source.is_numerical()
            }
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
