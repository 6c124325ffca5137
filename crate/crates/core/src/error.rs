use thiserror::Error;

use crate::complex::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty facet list")]
    Empty,

    #[error("facet {0:?} does not have four distinct vertices")]
    DegenerateFacet(Vec<VertexId>),

    #[error("face {0:?} is not in the complex")]
    FaceNotFound(Vec<VertexId>),

    #[error("not a closed surface: {0}")]
    NotASurface(String),

    #[error("{op}: precondition failed: {reason}")]
    Precondition { op: &'static str, reason: String },

    #[error("{op}: result is not a normal 3-pseudomanifold: {reason}")]
    InvalidResult { op: &'static str, reason: String },

    #[error("{op}: g2 postcondition violated (expected delta {expected}, got {actual})")]
    G2Mismatch {
        op: &'static str,
        expected: i64,
        actual: i64,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("certificate: {0}")]
    Certificate(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn pre(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Precondition {
            op,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
