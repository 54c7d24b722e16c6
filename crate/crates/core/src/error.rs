use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Malformed PNM data. `offset` is the byte position where decoding stopped.
    #[error("pnm parse error at byte {offset}: {reason}")]
    Pnm { offset: usize, reason: String },

    /// Malformed `.seg` ground truth; `line` is 1-based.
    #[error("seg parse error: {reason} at line {line}")]
    Seg { line: usize, reason: String },

    #[error("manifest error: {reason}, line {line}")]
    Manifest { line: usize, reason: String },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn pnm(offset: usize, reason: impl Into<String>) -> Self {
        Error::Pnm {
            offset,
            reason: reason.into(),
        }
    }

    pub(crate) fn seg(line: usize, reason: impl Into<String>) -> Self {
        Error::Seg {
            line,
            reason: reason.into(),
        }
    }
}
