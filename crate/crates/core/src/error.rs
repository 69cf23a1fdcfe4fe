use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point is not on {manifold}: membership residual {residual:.3e}")]
    NotOnManifold { manifold: String, residual: f64 },

    #[error("vector is not tangent to {manifold}: tangency residual {residual:.3e}")]
    NotTangent { manifold: String, residual: f64 },

    /// The point lies on (or numerically too close to) the cut locus, or a
    /// computation left the normal coordinate chart.
    #[error("chart violation: {0}")]
    ChartViolation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{method} is not supported on {manifold}")]
    Unsupported { manifold: String, method: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed data: {0}")]
    Format(String),
}

impl Error {
    /// True for errors caused by user configuration rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_) | Error::Unsupported { .. } | Error::ShapeMismatch(_)
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn chart(msg: impl Into<String>) -> Self {
        Error::ChartViolation(msg.into())
    }
}
