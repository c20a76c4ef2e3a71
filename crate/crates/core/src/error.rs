use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("duplicate cell ({entity}, {period})")]
    DuplicateCell { entity: String, period: String },

    #[error("missing observation for ({entity}, {period})")]
    MissingObservation { entity: String, period: String },

    #[error("zero variance series for entities: {}", .entities.join(", "))]
    ZeroVariance { entities: Vec<String> },

    #[error("window [{start}, {start}+{length}) out of range for {periods} periods")]
    WindowOutOfRange {
        start: usize,
        length: usize,
        periods: usize,
    },

    #[error("unknown entity {0}")]
    UnknownEntity(String),

    #[error("non-embeddable distance matrix: eigenvalue {eigenvalue:e} below tolerance")]
    NonEmbeddable { eigenvalue: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("window {index} ({start} .. {end}): {source}")]
    InWindow {
        index: usize,
        start: String,
        end: String,
        source: Box<Error>,
    },
}

impl Error {
    /// Process exit code for the command-line front end: 3 for numerical
    /// failures, 2 for everything else (input and validation errors).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonEmbeddable { .. } | Error::Degenerate(_) => 3,
            Error::InWindow { source, .. } => source.exit_code(),
            _ => 2,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
