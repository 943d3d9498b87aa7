use thiserror::Error;

/// Errors raised by tensor, kernel and recompression routines.
#[derive(Error, Debug)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index out of bounds: {0}")]
    Bounds(String),

    #[error("resource limit exceeded: {what} needs {requested} elements, cap is {cap}")]
    Resource {
        what: String,
        requested: usize,
        cap: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value in {0}")]
    Numeric(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("iteration failed: {0}")]
    Convergence(String),

    #[error("malformed tensor file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }

    /// Short lowercase name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Shape(_) => "shape",
            Error::Bounds(_) => "bounds",
            Error::Resource { .. } => "resource",
            Error::Domain(_) => "domain",
            Error::Numeric(_) => "numeric",
            Error::Usage(_) => "usage",
            Error::Convergence(_) => "convergence",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn shape_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Shape(msg.into()))
}
