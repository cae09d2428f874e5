// SPDX-License-Identifier: Apache-2.0

//! Fourier anchors: clustering, grid tiling, target coding and sample
//! assignment.
//!
//! Regression targets are normalised by the anchor's per-level ellipse
//! extents:
//!
//! ```text
//! ΔF_a = (G_a − A_a) / E_x    ΔF_c = (G_c − A_c) / E_y
//! ΔF_b = (G_b − A_b) / E_x    ΔF_d = (G_d − A_d) / E_y
//! ΔL_x = (G_Lx − A_Lx) / E_x1 ΔL_y = (G_Ly − A_Ly) / E_y1
//! ```

use alloc::vec;
use alloc::vec::Vec;

use crate::contour::{Contour, Point};
use crate::efd::{
    decode_points, efd_encode, harmonic_extents, FourierDescriptor, Harmonic, PhaseTable,
    DEFAULT_ENCODE_SAMPLES,
};
use crate::error::{GeomError, Result};
use crate::kmeans::kmeans;
use crate::metrics::combined_iou;

pub const DEFAULT_ANCHORS: usize = 9;
pub const DEFAULT_STRIDE: u32 = 8;
pub const DEFAULT_IMAGE_SIZE: (u32, u32) = (416, 416);
/// Anchors are decoded at this many points when measuring IoU against GT.
pub const ASSIGN_DECODE_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSet {
    /// Shape templates, all centred at the origin.
    pub base_anchors: Vec<FourierDescriptor>,
    pub stride: u32,
    pub image_size: (u32, u32),
}

impl AnchorSet {
    pub fn new(
        base_anchors: Vec<FourierDescriptor>,
        stride: u32,
        image_size: (u32, u32),
    ) -> Result<Self> {
        let set = AnchorSet {
            base_anchors,
            stride,
            image_size,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .base_anchors
            .first()
            .ok_or(GeomError::InvalidParameter("anchor set is empty"))?;
        if self.stride == 0 {
            return Err(GeomError::InvalidParameter("stride must be at least 1"));
        }
        for a in &self.base_anchors {
            a.validate()?;
            if a.n_harmonics() != first.n_harmonics() {
                return Err(GeomError::ShapeMismatch {
                    expected: first.n_harmonics(),
                    got: a.n_harmonics(),
                });
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.base_anchors.len()
    }

    /// Grid columns and rows, `⌈W/stride⌉ × ⌈H/stride⌉`.
    pub fn grid(&self) -> (usize, usize) {
        let s = self.stride as usize;
        (
            (self.image_size.0 as usize).div_ceil(s),
            (self.image_size.1 as usize).div_ceil(s),
        )
    }

    pub fn placed_count(&self) -> usize {
        let (gx, gy) = self.grid();
        gx * gy * self.k()
    }
}

/// Cluster the 4N coefficient vectors (centres excluded) into `k` anchors.
///
/// Anchors come out by decreasing cluster population, ties broken by the
/// first coefficient. Stride and image size take their defaults.
pub fn fit_anchors(descriptors: &[FourierDescriptor], k: usize, seed: u64) -> Result<AnchorSet> {
    let n = descriptors
        .first()
        .map(FourierDescriptor::n_harmonics)
        .ok_or(GeomError::DegenerateClustering { k, distinct: 0 })?;
    for d in descriptors {
        d.validate()?;
        if d.n_harmonics() != n {
            return Err(GeomError::ShapeMismatch {
                expected: n,
                got: d.n_harmonics(),
            });
        }
    }
    let rows: Vec<Vec<f64>> = descriptors.iter().map(|d| d.flat_coefficients()).collect();
    let km = kmeans(&rows, k, seed)?;

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        km.populations[j]
            .cmp(&km.populations[i])
            .then(km.centroids[i][0].total_cmp(&km.centroids[j][0]))
            .then(i.cmp(&j))
    });
    let period = descriptors[0].period_samples;
    let base_anchors = order
        .into_iter()
        .map(|c| {
            let mut d = FourierDescriptor::from_flat(Point::default(), &km.centroids[c])?;
            d.period_samples = period;
            Ok(d)
        })
        .collect::<Result<Vec<_>>>()?;
    AnchorSet::new(base_anchors, DEFAULT_STRIDE, DEFAULT_IMAGE_SIZE)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacedAnchor {
    /// Grid column and row.
    pub cell: (usize, usize),
    /// Index into [`AnchorSet::base_anchors`].
    pub base: usize,
    pub descriptor: FourierDescriptor,
}

/// Copy every base anchor to every grid cell centre, row-major over cells and
/// base-anchor-major within a cell.
pub fn tile_anchors(set: &AnchorSet) -> Vec<PlacedAnchor> {
    let (gx, gy) = set.grid();
    let stride = set.stride as f64;
    let mut out = Vec::with_capacity(set.placed_count());
    for j in 0..gy {
        for i in 0..gx {
            let center = Point::new((i as f64 + 0.5) * stride, (j as f64 + 0.5) * stride);
            for (b, base) in set.base_anchors.iter().enumerate() {
                out.push(PlacedAnchor {
                    cell: (i, j),
                    base: b,
                    descriptor: base.with_center(center),
                });
            }
        }
    }
    out
}

/// Normalised regression targets of one GT relative to one anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetDelta {
    /// `(ΔF_a, ΔF_b, ΔF_c, ΔF_d)` per level.
    pub fourier: Vec<[f64; 4]>,
    /// `(ΔL_x, ΔL_y)`.
    pub loc: [f64; 2],
}

impl TargetDelta {
    pub fn zeros(n: usize) -> Self {
        TargetDelta {
            fourier: vec![[0.0; 4]; n],
            loc: [0.0; 2],
        }
    }

    pub fn flat_fourier(&self) -> Vec<f64> {
        self.fourier.iter().flatten().copied().collect()
    }

    pub fn is_finite(&self) -> bool {
        self.loc
            .iter()
            .chain(self.fourier.iter().flatten())
            .all(|v| v.is_finite())
    }
}

fn same_order(g: &FourierDescriptor, a: &FourierDescriptor) -> Result<()> {
    if g.n_harmonics() != a.n_harmonics() {
        return Err(GeomError::ShapeMismatch {
            expected: a.n_harmonics(),
            got: g.n_harmonics(),
        });
    }
    Ok(())
}

/// Targets of `gt` against `anchor`; extents come from the anchor.
pub fn encode_targets(gt: &FourierDescriptor, anchor: &FourierDescriptor) -> Result<TargetDelta> {
    same_order(gt, anchor)?;
    let e = harmonic_extents(anchor);
    let fourier = gt
        .harmonics
        .iter()
        .zip(&anchor.harmonics)
        .zip(&e.levels)
        .map(|((g, a), &(ex, ey))| {
            [
                (g.a - a.a) / ex,
                (g.b - a.b) / ex,
                (g.c - a.c) / ey,
                (g.d - a.d) / ey,
            ]
        })
        .collect();
    let loc = [
        (gt.center.x - anchor.center.x) / e.x(0),
        (gt.center.y - anchor.center.y) / e.y(0),
    ];
    Ok(TargetDelta { fourier, loc })
}

/// Inverse of [`encode_targets`] for the same anchor.
pub fn decode_targets(
    delta: &TargetDelta,
    anchor: &FourierDescriptor,
) -> Result<FourierDescriptor> {
    if delta.fourier.len() != anchor.n_harmonics() {
        return Err(GeomError::ShapeMismatch {
            expected: anchor.n_harmonics(),
            got: delta.fourier.len(),
        });
    }
    let e = harmonic_extents(anchor);
    let harmonics = delta
        .fourier
        .iter()
        .zip(&anchor.harmonics)
        .zip(&e.levels)
        .map(|((d, a), &(ex, ey))| {
            Harmonic::new(
                a.a + d[0] * ex,
                a.b + d[1] * ex,
                a.c + d[2] * ey,
                a.d + d[3] * ey,
            )
        })
        .collect();
    let center = Point::new(
        anchor.center.x + delta.loc[0] * e.x(0),
        anchor.center.y + delta.loc[1] * e.y(0),
    );
    Ok(FourierDescriptor {
        center,
        harmonics,
        period_samples: anchor.period_samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssignConfig {
    pub pos_threshold: f64,
    pub neg_threshold: f64,
    /// Promote the best anchor of every GT that would otherwise get no positive.
    pub force_match: bool,
    pub decode_samples: usize,
}

impl Default for AssignConfig {
    fn default() -> Self {
        AssignConfig {
            pos_threshold: 0.25,
            neg_threshold: 0.10,
            force_match: true,
            decode_samples: ASSIGN_DECODE_SAMPLES,
        }
    }
}

impl AssignConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.neg_threshold >= 0.0
            && self.neg_threshold < self.pos_threshold
            && self.pos_threshold <= 1.0;
        if !ok {
            return Err(GeomError::InvalidParameter(
                "thresholds must satisfy 0 ≤ neg < pos ≤ 1",
            ));
        }
        if self.decode_samples < 3 {
            return Err(GeomError::InvalidParameter(
                "decode_samples must be at least 3",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnchorLabel {
    Positive(usize),
    Negative,
    Ignore,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositiveMatch {
    pub anchor: usize,
    pub gt: usize,
    pub iou: f64,
    /// Promoted by force matching rather than by threshold.
    pub forced: bool,
    pub delta: TargetDelta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentResult {
    pub labels: Vec<AnchorLabel>,
    /// Best combined IoU of each anchor over all GTs.
    pub best_iou: Vec<f64>,
    /// Positives in anchor order.
    pub positives: Vec<PositiveMatch>,
}

impl AssignmentResult {
    pub fn counts(&self) -> (usize, usize, usize) {
        self.labels.iter().fold((0, 0, 0), |(p, n, i), l| match l {
            AnchorLabel::Positive(_) => (p + 1, n, i),
            AnchorLabel::Negative => (p, n + 1, i),
            AnchorLabel::Ignore => (p, n, i + 1),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub contour: Contour,
    pub descriptor: FourierDescriptor,
}

impl GroundTruth {
    /// Encode `contour` with `harmonics` levels at the default sample count.
    pub fn from_contour(contour: Contour, harmonics: usize) -> Result<Self> {
        let descriptor = efd_encode(&contour, harmonics, DEFAULT_ENCODE_SAMPLES)?;
        Ok(GroundTruth {
            contour,
            descriptor,
        })
    }
}

/// Per-anchor IoU rows against a fixed GT list. Rows are independent, so
/// callers may evaluate them in any order or in parallel.
pub struct AnchorMatcher<'a> {
    gts: &'a [GroundTruth],
    table: PhaseTable,
}

impl<'a> AnchorMatcher<'a> {
    pub fn new(gts: &'a [GroundTruth], cfg: &AssignConfig) -> Result<Self> {
        cfg.validate()?;
        if gts.is_empty() {
            return Err(GeomError::EmptyGroundTruth);
        }
        for g in gts {
            g.contour.validate()?;
        }
        Ok(AnchorMatcher {
            gts,
            table: PhaseTable::new(cfg.decode_samples),
        })
    }

    /// Combined IoU of one anchor against every GT.
    pub fn ious(&self, anchor: &FourierDescriptor) -> Result<Vec<f64>> {
        anchor.validate()?;
        let contour = Contour::new(decode_points(anchor, &self.table), 0);
        self.gts
            .iter()
            .map(|g| combined_iou(&contour, &g.contour))
            .collect()
    }
}

/// Label anchors from precomputed IoU rows (`rows[anchor][gt]`).
pub fn label_anchors(
    anchors: &[PlacedAnchor],
    gts: &[GroundTruth],
    rows: &[Vec<f64>],
    cfg: &AssignConfig,
) -> Result<AssignmentResult> {
    cfg.validate()?;
    if gts.is_empty() {
        return Err(GeomError::EmptyGroundTruth);
    }
    if rows.len() != anchors.len() {
        return Err(GeomError::ShapeMismatch {
            expected: anchors.len(),
            got: rows.len(),
        });
    }
    let mut labels = Vec::with_capacity(anchors.len());
    let mut best_iou = Vec::with_capacity(anchors.len());
    let mut forced = vec![false; anchors.len()];
    for row in rows {
        if row.len() != gts.len() {
            return Err(GeomError::ShapeMismatch {
                expected: gts.len(),
                got: row.len(),
            });
        }
        // First maximum wins, so ties go to the lower GT index.
        let (g, best) = row
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, cur| {
                if cur.1 > acc.1 {
                    cur
                } else {
                    acc
                }
            });
        best_iou.push(best);
        labels.push(if best >= cfg.pos_threshold {
            AnchorLabel::Positive(g)
        } else if best < cfg.neg_threshold {
            AnchorLabel::Negative
        } else {
            AnchorLabel::Ignore
        });
    }

    if cfg.force_match && !anchors.is_empty() {
        #[allow(clippy::needless_range_loop)]
        for g in 0..gts.len() {
            if labels.contains(&AnchorLabel::Positive(g)) {
                continue;
            }
            let mut candidates: Vec<usize> = (0..anchors.len()).collect();
            candidates.sort_by(|&a, &b| rows[b][g].total_cmp(&rows[a][g]).then(a.cmp(&b)));
            let pick = candidates
                .iter()
                .copied()
                .find(|&a| !matches!(labels[a], AnchorLabel::Positive(_)))
                .unwrap_or(candidates[0]);
            labels[pick] = AnchorLabel::Positive(g);
            forced[pick] = true;
        }
    }

    let mut positives = Vec::new();
    for (i, label) in labels.iter().enumerate() {
        if let AnchorLabel::Positive(g) = *label {
            positives.push(PositiveMatch {
                anchor: i,
                gt: g,
                iou: rows[i][g],
                forced: forced[i],
                delta: encode_targets(&gts[g].descriptor, &anchors[i].descriptor)?,
            });
        }
    }
    Ok(AssignmentResult {
        labels,
        best_iou,
        positives,
    })
}

/// Serial assignment: IoU rows for every anchor, then labelling.
pub fn assign(
    anchors: &[PlacedAnchor],
    gts: &[GroundTruth],
    cfg: &AssignConfig,
) -> Result<AssignmentResult> {
    let matcher = AnchorMatcher::new(gts, cfg)?;
    let rows = anchors
        .iter()
        .map(|a| matcher.ious(&a.descriptor))
        .collect::<Result<Vec<_>>>()?;
    label_anchors(anchors, gts, &rows, cfg)
}
