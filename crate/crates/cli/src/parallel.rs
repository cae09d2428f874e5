// SPDX-License-Identifier: Apache-2.0

//! Worker pools for dataset-level loops. Results are always collected in
//! input order, so the worker count never changes the output.

use fcontour_core::anchor::{
    label_anchors, AnchorMatcher, AssignConfig, AssignmentResult, GroundTruth, PlacedAnchor,
};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Run `f` on a dedicated pool with `workers` threads (0 = rayon default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Map `f` over `items` on `workers` threads, keeping input order.
pub fn par_map<I, T, F>(workers: usize, items: &[I], f: F) -> Result<Vec<T>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    with_workers(workers, || items.par_iter().map(&f).collect())
}

/// [`fcontour_core::anchor::assign`] with the IoU rows spread over workers.
pub fn assign_parallel(
    anchors: &[PlacedAnchor],
    gts: &[GroundTruth],
    cfg: &AssignConfig,
    workers: usize,
) -> Result<AssignmentResult> {
    let matcher = AnchorMatcher::new(gts, cfg)?;
    let rows = par_map(workers, anchors, |a| matcher.ious(&a.descriptor))?
        .into_iter()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(label_anchors(anchors, gts, &rows, cfg)?)
}
