use thiserror::Error;

use crate::pdf::PdfError;

#[derive(Debug, Error)]
pub enum Error {
    /// The input is not a format this library can clean. Not a parse failure.
    #[error("unsupported format: {0}")]
    Unsupported(String),

    #[error("malformed {format} at offset {offset:#x}: {reason}")]
    Malformed {
        format: &'static str,
        offset: u64,
        reason: String,
    },

    #[error("unknown member '{0}'")]
    UnknownMember(String),

    #[error("encrypted member '{0}'")]
    EncryptedMember(String),

    #[error("nesting deeper than {0} levels")]
    DepthExceeded(usize),

    #[error("in '{path}': {source}")]
    Member {
        path: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Pdf(#[from] PdfError),
}

impl Error {
    pub(crate) fn malformed(format: &'static str, offset: usize, reason: impl Into<String>) -> Self {
        Error::Malformed {
            format,
            offset: offset as u64,
            reason: reason.into(),
        }
    }

    /// Whether this error means "format not handled" rather than "broken input".
    pub fn is_unsupported(&self) -> bool {
        match self {
            Error::Unsupported(_) => true,
            Error::Pdf(p) => p.is_unsupported(),
            _ => false,
        }
    }

    /// Byte offset of a parse failure, when known.
    pub fn offset(&self) -> Option<u64> {
        match self {
            Error::Malformed { offset, .. } => Some(*offset),
            Error::Member { source, .. } => source.offset(),
            Error::Pdf(p) => p.offset(),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
