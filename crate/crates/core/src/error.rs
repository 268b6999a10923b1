use thiserror::Error;

/// Errors raised by the relay-chain library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// A numerical procedure (quadrature, inversion, root bracketing) failed.
    #[error("numerical failure in {op}: {msg}")]
    Numerical { op: &'static str, msg: String },

    #[error("unsupported layout: {0}")]
    UnsupportedLayout(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// Invalid configuration or unknown registry entry.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed config JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    pub(crate) fn numerical(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Numerical { op, msg: msg.into() }
    }

    /// True for errors caused by bad user input rather than numerical trouble.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Json(_)
                | Error::Io(_)
                | Error::UnsupportedLayout(_)
                | Error::DegenerateGeometry(_)
                | Error::Domain { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
