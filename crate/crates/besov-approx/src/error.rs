use thiserror::Error;

/// Errors produced by grid construction, transforms and experiments.
///
/// `NyquistViolation` and `DomainTooSmall` are numerical preconditions: the
/// message names the violated inequality so a caller (or the CLI) can report
/// exactly which axis needs a finer or larger grid.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("axis mismatch: {0}")]
    AxisMismatch(String),

    #[error("non-finite value {value} at node {coords:?} (flat index {index})")]
    NonFinite {
        value: f64,
        coords: Vec<f64>,
        index: usize,
    },

    #[error(
        "Nyquist violation on axis {axis}: required pi/h = {required:.6} > available {available:.6} \
         (inequality pi/h_j >= sigma_j fails)"
    )]
    NyquistViolation {
        axis: usize,
        required: f64,
        available: f64,
    },

    #[error(
        "domain too small on axis {axis}: tail bound {bound:.3e} exceeds tolerance {tol:.3e} \
         (inequality (2 L^(1-p)/(p-1))^(1/p) <= tol fails)"
    )]
    DomainTooSmall { axis: usize, bound: f64, tol: f64 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("io error for {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {detail}")]
    Format { path: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
