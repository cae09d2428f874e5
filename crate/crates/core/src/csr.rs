// SPDX-License-Identifier: Apache-2.0

//! Geometry of contour sampling refinement.
//!
//! The pipeline per class is: keep the top-n proposals, extract the closely
//! clustered subset around a pivot, average it into a merged contour, sample
//! `k` boundary points plus the centre, and build one box per sample. The
//! merged contour then serves as the anchor for a single refinement step.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::anchor::{decode_targets, encode_targets, TargetDelta};
use crate::contour::{BBox, Contour, Point};
use crate::efd::{efd_decode, FourierDescriptor, Harmonic, PhaseTable};
use crate::error::{GeomError, Result};
use crate::math;
use crate::metrics::combined_iou;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredProposal {
    pub descriptor: FourierDescriptor,
    pub score: f64,
    pub class_id: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineConfig {
    pub top_n: usize,
    pub cluster_iou: f64,
    pub sample_k: usize,
    /// Box side as a fraction of the merged contour's longer bbox side.
    pub box_scale: f64,
    pub decode_samples: usize,
    /// Clip boxes to `[0, W] × [0, H]` when set.
    pub image_size: Option<(f64, f64)>,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig {
            top_n: 20,
            cluster_iou: 0.7,
            sample_k: 16,
            box_scale: 0.2,
            decode_samples: 128,
            image_size: None,
        }
    }
}

impl RefineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.top_n == 0 {
            return Err(GeomError::InvalidParameter("top_n must be at least 1"));
        }
        if !(self.cluster_iou > 0.0 && self.cluster_iou < 1.0) {
            return Err(GeomError::InvalidParameter(
                "cluster_iou must lie in (0, 1)",
            ));
        }
        if self.sample_k < 3 {
            return Err(GeomError::InvalidParameter("sample_k must be at least 3"));
        }
        if self.decode_samples < 3 {
            return Err(GeomError::InvalidParameter(
                "decode_samples must be at least 3",
            ));
        }
        if !(self.box_scale.is_finite() && self.box_scale > 0.0) {
            return Err(GeomError::InvalidParameter("box_scale must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergedContour {
    pub descriptor: FourierDescriptor,
    pub member_count: usize,
    pub mean_member_iou: f64,
}

/// Highest-scoring `top_n` proposals of every class, ties to the earlier
/// input. Classes come out in ascending id order.
pub fn select_top_n(
    proposals: &[ScoredProposal],
    cfg: &RefineConfig,
) -> Vec<(u32, Vec<ScoredProposal>)> {
    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, p) in proposals.iter().enumerate() {
        by_class.entry(p.class_id).or_default().push(i);
    }
    by_class
        .into_iter()
        .map(|(class, mut idx)| {
            // Stable sort keeps input order among equal scores.
            idx.sort_by(|&a, &b| proposals[b].score.total_cmp(&proposals[a].score));
            idx.truncate(cfg.top_n);
            (
                class,
                idx.into_iter().map(|i| proposals[i].clone()).collect(),
            )
        })
        .collect()
}

/// Closely clustered subset of one class's proposals.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub pivot: usize,
    /// Input indices in ascending order, pivot included.
    pub members: Vec<usize>,
}

/// Pick the proposal with the most neighbours at `IoU ≥ cluster_iou` (ties to
/// the higher score, then the earlier index) and gather it with those
/// neighbours. Without any such neighbour, the best-scoring proposal stands
/// alone.
pub fn cluster_proposals(proposals: &[ScoredProposal], cfg: &RefineConfig) -> Result<Cluster> {
    cfg.validate()?;
    if proposals.is_empty() {
        return Err(GeomError::EmptyProposals);
    }
    let contours = proposals
        .iter()
        .map(|p| efd_decode(&p.descriptor, cfg.decode_samples))
        .collect::<Result<Vec<_>>>()?;
    let n = proposals.len();
    let mut close = alloc::vec![alloc::vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let iou = combined_iou(&contours[i], &contours[j])?;
            let hit = iou >= cfg.cluster_iou;
            close[i][j] = hit;
            close[j][i] = hit;
        }
    }
    let counts: Vec<usize> = close
        .iter()
        .map(|row| row.iter().filter(|&&b| b).count())
        .collect();
    let better = |a: usize, b: usize| -> bool {
        // Is `a` preferred over the current best `b`?
        counts[a] > counts[b] || (counts[a] == counts[b] && proposals[a].score > proposals[b].score)
    };
    let mut pivot = 0;
    for i in 1..n {
        if better(i, pivot) {
            pivot = i;
        }
    }
    if counts[pivot] == 0 {
        // Every count is zero here, so the pivot is already the best score.
        return Ok(Cluster {
            pivot,
            members: alloc::vec![pivot],
        });
    }
    let members = (0..n).filter(|&j| j == pivot || close[pivot][j]).collect();
    Ok(Cluster { pivot, members })
}

/// Unweighted mean of centres and coefficients.
pub fn merge_cluster(members: &[ScoredProposal], cfg: &RefineConfig) -> Result<MergedContour> {
    let first = members.first().ok_or(GeomError::EmptyProposals)?;
    let n = first.descriptor.n_harmonics();
    for m in members {
        m.descriptor.validate()?;
        if m.descriptor.n_harmonics() != n {
            return Err(GeomError::ShapeMismatch {
                expected: n,
                got: m.descriptor.n_harmonics(),
            });
        }
    }
    let inv = 1.0 / members.len() as f64;
    let mean = |f: &dyn Fn(&FourierDescriptor) -> f64| -> f64 {
        if members.len() == 1 {
            return f(&members[0].descriptor);
        }
        math::compensated_sum(members.iter().map(|m| f(&m.descriptor))) * inv
    };
    let center = Point::new(mean(&|d| d.center.x), mean(&|d| d.center.y));
    let harmonics = (0..n)
        .map(|i| {
            Harmonic::new(
                mean(&|d| d.harmonics[i].a),
                mean(&|d| d.harmonics[i].b),
                mean(&|d| d.harmonics[i].c),
                mean(&|d| d.harmonics[i].d),
            )
        })
        .collect();
    let descriptor = FourierDescriptor {
        center,
        harmonics,
        period_samples: first.descriptor.period_samples,
    };

    let merged = efd_decode(&descriptor, cfg.decode_samples)?;
    let ious = members
        .iter()
        .map(|m| combined_iou(&merged, &efd_decode(&m.descriptor, cfg.decode_samples)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(MergedContour {
        descriptor,
        member_count: members.len(),
        mean_member_iou: math::compensated_sum(ious) * inv,
    })
}

/// `sample_k` boundary points at `t = i` with period `sample_k`, then the centre.
pub fn sample_points(m: &MergedContour, cfg: &RefineConfig) -> Result<Vec<Point>> {
    cfg.validate()?;
    m.descriptor.validate()?;
    let table = PhaseTable::new(cfg.sample_k);
    let mut pts = crate::efd::decode_points(&m.descriptor, &table);
    pts.push(m.descriptor.center);
    Ok(pts)
}

/// One square box per point, side `box_scale · max(bbox side)` of the decoded
/// merged contour, clipped to the image when configured.
pub fn sample_boxes(points: &[Point], m: &MergedContour, cfg: &RefineConfig) -> Result<Vec<BBox>> {
    cfg.validate()?;
    let decoded: Contour = efd_decode(&m.descriptor, cfg.decode_samples)?;
    let bb = decoded
        .bbox()
        .ok_or(GeomError::DegenerateContour("no vertices"))?;
    let half = 0.5 * cfg.box_scale * bb.width().max(bb.height());
    Ok(points
        .iter()
        .map(|p| {
            let b = BBox {
                min: Point::new(p.x - half, p.y - half),
                max: Point::new(p.x + half, p.y + half),
            };
            match cfg.image_size {
                Some((w, h)) => b.clip(w, h),
                None => b,
            }
        })
        .collect())
}

/// Refinement targets of `gt` with the merged contour as anchor.
pub fn refine_encode(gt: &FourierDescriptor, m: &MergedContour) -> Result<TargetDelta> {
    encode_targets(gt, &m.descriptor)
}

/// Apply one refinement delta. Takes the merged contour by value: a merged
/// contour is refined exactly once.
pub fn refine_apply(m: MergedContour, delta: TargetDelta) -> Result<FourierDescriptor> {
    decode_targets(&delta, &m.descriptor)
}

/// Everything the refinement stage produces for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct RefineOutput {
    pub class_id: u32,
    /// The class's top-n proposals, in selection order.
    pub selected: Vec<ScoredProposal>,
    /// Cluster over `selected`.
    pub cluster: Cluster,
    pub merged: MergedContour,
    pub points: Vec<Point>,
    pub boxes: Vec<BBox>,
}

/// Run selection, clustering, merging, sampling and boxing for one class.
pub fn refine_class(
    class_id: u32,
    selected: Vec<ScoredProposal>,
    cfg: &RefineConfig,
) -> Result<RefineOutput> {
    let cluster = cluster_proposals(&selected, cfg)?;
    let members: Vec<ScoredProposal> = cluster
        .members
        .iter()
        .map(|&i| selected[i].clone())
        .collect();
    let merged = merge_cluster(&members, cfg)?;
    let points = sample_points(&merged, cfg)?;
    let boxes = sample_boxes(&points, &merged, cfg)?;
    Ok(RefineOutput {
        class_id,
        selected,
        cluster,
        merged,
        points,
        boxes,
    })
}

/// [`refine_class`] over every class present, in ascending class order.
pub fn refine_all(proposals: &[ScoredProposal], cfg: &RefineConfig) -> Result<Vec<RefineOutput>> {
    cfg.validate()?;
    select_top_n(proposals, cfg)
        .into_iter()
        .map(|(class, selected)| refine_class(class, selected, cfg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn circle(cx: f64, cy: f64, r: f64, score: f64, class_id: u32) -> ScoredProposal {
        ScoredProposal {
            descriptor: FourierDescriptor::circle(Point::new(cx, cy), r, 7),
            score,
            class_id,
        }
    }

    #[test]
    fn top_n_per_class() {
        let cfg = RefineConfig::default();
        let props: Vec<_> = (0..30)
            .map(|i| circle(0.0, 0.0, 5.0, i as f64 / 30.0, 1))
            .collect();
        let sel = select_top_n(&props, &cfg);
        assert_eq!(sel.len(), 1);
        assert_eq!(sel[0].1.len(), 20);
        assert!(sel[0].1.iter().all(|p| p.score >= 10.0 / 30.0));

        let sel = select_top_n(&props[..5], &cfg);
        assert_eq!(sel[0].1.len(), 5);

        let mut two: Vec<_> = (0..25)
            .map(|i| circle(0.0, 0.0, 5.0, 0.5 + i as f64 * 0.01, 1))
            .collect();
        two.extend((0..25).map(|_| circle(0.0, 0.0, 5.0, 0.5, 2)));
        let sel = select_top_n(&two, &cfg);
        assert_eq!(
            sel.iter().map(|(c, v)| (*c, v.len())).collect::<Vec<_>>(),
            vec![(1, 20), (2, 20)]
        );
    }

    #[test]
    fn identical_proposals_cluster_fully() {
        let props: Vec<_> = (0..20).map(|_| circle(30.0, 30.0, 10.0, 0.9, 0)).collect();
        let c = cluster_proposals(&props, &RefineConfig::default()).unwrap();
        assert_eq!(c.members.len(), 20);
        assert_eq!(c.pivot, 0);
    }

    #[test]
    fn outlier_left_out() {
        let mut props: Vec<_> = (0..5)
            .map(|i| circle(30.0 + 0.2 * i as f64, 30.0, 10.0, 0.5, 0))
            .collect();
        props.push(circle(300.0, 300.0, 10.0, 0.99, 0));
        let c = cluster_proposals(&props, &RefineConfig::default()).unwrap();
        assert_eq!(c.members, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn no_close_pairs_falls_back_to_best_score() {
        let props = vec![
            circle(0.0, 0.0, 10.0, 0.3, 0),
            circle(100.0, 0.0, 10.0, 0.8, 0),
            circle(0.0, 100.0, 10.0, 0.5, 0),
        ];
        let c = cluster_proposals(&props, &RefineConfig::default()).unwrap();
        assert_eq!(
            c,
            Cluster {
                pivot: 1,
                members: vec![1]
            }
        );
        assert_eq!(
            cluster_proposals(&[], &RefineConfig::default()).unwrap_err(),
            GeomError::EmptyProposals
        );
    }

    #[test]
    fn merge_two_translated_circles() {
        let m = merge_cluster(
            &[circle(0.0, 0.0, 4.0, 1.0, 0), circle(2.0, 0.0, 4.0, 1.0, 0)],
            &RefineConfig::default(),
        )
        .unwrap();
        assert_eq!(m.descriptor.center, Point::new(1.0, 0.0));
        assert_eq!(m.descriptor.harmonics[0], Harmonic::new(0.0, 4.0, 4.0, 0.0));
        assert_eq!(m.member_count, 2);
    }

    #[test]
    fn merge_identical_is_identity() {
        let p = circle(3.0, 4.0, 2.5, 1.0, 0);
        let m =
            merge_cluster(&[p.clone(), p.clone(), p.clone()], &RefineConfig::default()).unwrap();
        assert_eq!(m.descriptor, p.descriptor);
        assert!((m.mean_member_iou - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sample_points_and_boxes() {
        let cfg = RefineConfig::default();
        let m = merge_cluster(&[circle(10.0, 20.0, 5.0, 1.0, 0)], &cfg).unwrap();
        let pts = sample_points(&m, &cfg).unwrap();
        assert_eq!(pts.len(), 17);
        assert_eq!(pts[16], Point::new(10.0, 20.0));
        for p in &pts[..16] {
            assert!((p.dist(Point::new(10.0, 20.0)) - 5.0).abs() < 1e-9);
        }
        let boxes = sample_boxes(&pts, &m, &cfg).unwrap();
        assert_eq!(boxes.len(), 17);
        for b in &boxes {
            assert!((b.width() - 2.0).abs() < 1e-6 && (b.height() - 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_descriptor_samples_collapse() {
        let cfg = RefineConfig::default();
        let m = MergedContour {
            descriptor: FourierDescriptor::zeros(Point::new(7.0, 8.0), 7),
            member_count: 1,
            mean_member_iou: 1.0,
        };
        assert!(sample_points(&m, &cfg)
            .unwrap()
            .iter()
            .all(|p| *p == Point::new(7.0, 8.0)));
    }

    #[test]
    fn boxes_clip_to_image() {
        let cfg = RefineConfig {
            image_size: Some((100.0, 100.0)),
            ..RefineConfig::default()
        };
        let m = merge_cluster(&[circle(50.0, 50.0, 20.0, 1.0, 0)], &cfg).unwrap();
        let b = sample_boxes(&[Point::new(0.0, 0.0)], &m, &cfg).unwrap()[0];
        assert_eq!(b.min, Point::new(0.0, 0.0));
        assert!((b.max.x - 4.0).abs() < 1e-6 && (b.max.y - 4.0).abs() < 1e-6);
    }

    #[test]
    fn refine_roundtrip() {
        let cfg = RefineConfig::default();
        let m = merge_cluster(&[circle(0.0, 0.0, 8.0, 1.0, 0)], &cfg).unwrap();
        let gt = FourierDescriptor::circle(Point::new(8.0, 0.0), 8.0, 7);
        let d = refine_encode(&gt, &m).unwrap();
        assert_eq!(d.loc, [0.5, 0.0]);
        assert_eq!(
            refine_encode(&m.descriptor, &m).unwrap(),
            TargetDelta::zeros(7)
        );
        let out = refine_apply(m.clone(), d).unwrap();
        assert!(out.center.dist(gt.center) < 1e-9);
        assert_eq!(
            refine_apply(m.clone(), TargetDelta::zeros(7)).unwrap(),
            m.descriptor
        );
    }
}
