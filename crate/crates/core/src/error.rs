use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integration did not reach tolerance: error estimate {achieved:.3e} > {tolerance:.3e}")]
    Integration { achieved: f64, tolerance: f64 },

    #[error("target mass {target} exceeds reachable mass {reachable}")]
    TargetUnreachable { target: f64, reachable: f64 },

    #[error("could not bracket target mass {target} (largest radius tried {radius})")]
    NonBracketing { target: f64, radius: f64 },

    #[error("log n + beta must be positive (n = {n}, beta = {beta})")]
    NonPositiveLevel { n: f64, beta: f64 },

    #[error("operation requires a product density")]
    NotProductDensity,

    #[error("operation requires the {required} norm")]
    UnsupportedNorm { required: &'static str },

    #[error("rejection sampler acceptance rate {rate:.2e} below floor {floor:.2e}")]
    RejectionRate { rate: f64, floor: f64 },

    #[error("realized point count {count} exceeds cap {cap}")]
    CapExceeded { count: u64, cap: u64 },

    #[error("vertex {vertex}: {source}")]
    Vertex {
        vertex: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_vertex(self, vertex: usize) -> Self {
        Error::Vertex {
            vertex,
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Configuration problems (as opposed to runtime failures).
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidParameter(_)
                | Error::DimensionMismatch { .. }
                | Error::NotProductDensity
                | Error::UnsupportedNorm { .. }
                | Error::NonPositiveLevel { .. }
        )
    }
}
