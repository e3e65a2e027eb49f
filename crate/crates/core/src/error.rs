use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid node id {0:?}: must be a non-empty token without whitespace")]
    InvalidNodeId(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("self-loop at node `{0}`")]
    SelfLoop(String),
    #[error("edge references unknown node `{0}`")]
    UnknownEndpoint(String),
    #[error("element {0} is not part of the host graph")]
    UnknownElement(String),

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("weight ({from}, {to}) does not lie on an edge")]
    WeightOffEdge { from: String, to: String },
    #[error("nonzero diagonal weight at node `{0}`")]
    NonzeroDiagonal(String),
    #[error("duplicate weight record ({from}, {to})")]
    DuplicateWeight { from: String, to: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("element set is not Alexandrov-open")]
    NotOpen,

    #[error("no residual for edge {0}")]
    MissingResidual(String),
    #[error("invalid residual for edge {0}: {1}")]
    InvalidResidual(String, f64),
    #[error("filtration is not monotone: {0}")]
    NonMonotoneFiltration(String),
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Input or parsing problems, as opposed to failures of the analysis itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Schema { .. } | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
