use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("capacity exceeded: {what} needs {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown site: {0}")]
    UnknownSite(String),

    #[error("representation mismatch: {left} vs {right}")]
    RepresentationMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("ground-state projection vanished (norm {norm:e})")]
    ZeroProjection { norm: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("degenerate device network: {0}")]
    DegenerateNetwork(String),

    #[error("interaction time mismatch: chi*tau = {chi_tau}, expected pi/2")]
    TimeMismatch { chi_tau: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}
