use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid arguments: {0}")]
    InvalidArguments(String),

    /// Two irrational quadratic values live in different fields Q(√D).
    #[error("unsupported field: cannot mix sqrt({0}) and sqrt({1})")]
    UnsupportedField(String, String),

    #[error("operation unsupported: {0}")]
    Unsupported(String),

    #[error("`{0}` is not a factor of the word at the scanned horizon")]
    NotAFactor(String),

    #[error("degenerate trajectory: {0}")]
    DegenerateTrajectory(String),

    #[error("word is not Sturmian: both 11 and 22 occur")]
    NotSturmian,

    #[error("type undetermined: neither 11 nor 22 within the first {0} letters")]
    Undetermined(usize),

    #[error("alphabet mismatch: p(1) = {found}, expected d = {expected}")]
    AlphabetMismatch { expected: usize, found: usize },

    #[error(
        "partition is not a disconnection of the extension graph: edge ({0}, {1}) crosses parts"
    )]
    NotADisconnection(String, String),

    #[error("degenerate graph: {0}")]
    DegenerateGraph(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArguments(msg.into())
}
