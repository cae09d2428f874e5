// SPDX-License-Identifier: Apache-2.0

#![no_std]

//! Contour geometry for Fourier-anchor detect-to-segment pipelines.
//!
//! Everything in this crate is a pure value-to-value transformation and only
//! needs `alloc`:
//!
//! - [`contour`]: closed polygons, shoelace area, canonical start/orientation,
//!   arc-length resampling.
//! - [`efd`]: the truncated Fourier series codec for closed contours.
//! - [`mask`]: marching-squares boundary extraction from label masks.
//! - [`raster`] and [`metrics`]: box/polar/combined IoU, DICE, Hausdorff
//!   distance and conformity.
//! - [`loss`]: reference forward arithmetic for the detection losses.
//! - [`anchor`] and [`kmeans`]: Fourier-anchor fitting, tiling, target coding
//!   and positive/negative assignment.
//! - [`csr`]: proposal selection, clustering, merging and the sampling
//!   geometry for contour refinement.
//!
//! File formats, synthetic data and the command-line tools live in the
//! `fcontour` crate.

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod anchor;
pub mod contour;
pub mod csr;
pub mod efd;
mod error;
pub mod kmeans;
pub mod loss;
pub mod mask;
mod math;
pub mod metrics;
pub mod raster;

pub use crate::contour::{BBox, Contour, Point};
pub use crate::efd::{FourierDescriptor, Harmonic, HarmonicExtents};
pub use crate::error::{GeomError, Result};
