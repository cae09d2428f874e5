// SPDX-License-Identifier: Apache-2.0

use fcontour_core::GeomError;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    /// Malformed input, with the 1-based line it was found on.
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    /// Well-formed input that violates a geometric contract.
    #[error("{context}: {source}")]
    Geometry {
        context: String,
        #[source]
        source: GeomError,
    },
    #[error("paired lists differ in length: {preds} predictions vs {gts} ground truths")]
    Pairing { preds: usize, gts: usize },
    #[error("generation gave up after {attempts} rejected draws for item {item}")]
    GenerationFailure { item: usize, attempts: usize },
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub fn geometry(context: impl Into<String>, source: GeomError) -> Self {
        Error::Geometry {
            context: context.into(),
            source,
        }
    }

    /// Process exit code: 2 for I/O and malformed files, 1 for validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Parse { .. } => 2,
            _ => 1,
        }
    }
}

impl From<GeomError> for Error {
    fn from(e: GeomError) -> Self {
        Error::geometry("invalid geometry", e)
    }
}
