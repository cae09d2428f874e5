// SPDX-License-Identifier: Apache-2.0

//! File formats, synthetic data, dataset evaluation and the `fcontour`
//! command-line tool on top of [`fcontour_core`].

pub mod cli;
mod error;
pub mod eval;
pub mod formats;
pub mod noise;
pub mod parallel;
pub mod synth;

pub use crate::error::{Error, Result};
pub use fcontour_core as core;
