// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = GeomError> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("degenerate contour: {0}")]
    DegenerateContour(&'static str),
    #[error("degenerate contour pair: polar radii are all zero")]
    DegeneratePair,
    #[error("need at least {required} samples for {harmonics} harmonics, got {got}")]
    InsufficientSamples {
        required: usize,
        harmonics: usize,
        got: usize,
    },
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(&'static str),
    #[error("rasterized region is empty")]
    EmptyRegion,
    #[error("undefined value: {0}")]
    Undefined(&'static str),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("clustering needs {k} distinct vectors, found {distinct}")]
    DegenerateClustering { k: usize, distinct: usize },
    #[error("ground-truth list is empty")]
    EmptyGroundTruth,
    #[error("proposal list is empty")]
    EmptyProposals,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}
