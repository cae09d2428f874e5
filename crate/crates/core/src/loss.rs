// SPDX-License-Identifier: Apache-2.0

//! Forward loss arithmetic: `L = L_loc + L_fou + L_con + L_cls`.
//!
//! These are reference values for checking a training implementation; there
//! is no gradient computation here.

use alloc::vec::Vec;

use crate::contour::Contour;
use crate::error::{GeomError, Result};
use crate::math;
use crate::metrics::combined_iou;

const SCORE_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    /// Weight of the BCE term in the classification loss.
    pub alpha: f64,
    /// Weight of the focal term in the classification loss.
    pub beta: f64,
    pub focal_gamma: f64,
    pub focal_alpha: f64,
    pub smooth_l1_beta: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            alpha: 0.25,
            beta: 0.75,
            focal_gamma: 2.0,
            focal_alpha: 0.25,
            smooth_l1_beta: 1.0,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.alpha,
            self.beta,
            self.focal_gamma,
            self.focal_alpha,
            self.smooth_l1_beta,
        ];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(GeomError::InvalidParameter(
                "loss weights must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossReport {
    pub l_loc: f64,
    pub l_fou: f64,
    pub l_con: f64,
    pub l_cls: f64,
    pub total: f64,
    /// Set when there were no positives, so the regression terms are zero.
    pub no_positives: bool,
}

/// Mean smooth-L1 over elements. `beta == 0` degenerates to plain L1.
pub fn smooth_l1(pred: &[f64], target: &[f64], cfg: &LossConfig) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(GeomError::ShapeMismatch {
            expected: target.len(),
            got: pred.len(),
        });
    }
    if pred.is_empty() {
        return Ok(0.0);
    }
    let beta = cfg.smooth_l1_beta;
    let sum: f64 = pred
        .iter()
        .zip(target)
        .map(|(p, t)| {
            let e = (p - t).abs();
            if e < beta {
                0.5 * e * e / beta
            } else {
                e - 0.5 * beta
            }
        })
        .sum();
    Ok(sum / pred.len() as f64)
}

/// `1 − combined_iou(pred, gt)`.
pub fn contour_loss(pred: &Contour, gt: &Contour) -> Result<f64> {
    Ok((1.0 - combined_iou(pred, gt)?).clamp(0.0, 1.0))
}

/// `alpha · mean BCE + beta · mean focal`, scores clamped to `[1e-7, 1 − 1e-7]`.
///
/// The focal term is `−α_t (1 − p_t)^γ ln p_t` with `α_t = focal_alpha` for
/// positives and `1 − focal_alpha` for negatives.
pub fn cls_loss(scores: &[f64], labels: &[bool], cfg: &LossConfig) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(GeomError::ShapeMismatch {
            expected: labels.len(),
            got: scores.len(),
        });
    }
    if scores.is_empty() {
        return Ok(0.0);
    }
    let mut bce = 0.0;
    let mut focal = 0.0;
    for (&s, &positive) in scores.iter().zip(labels) {
        if !s.is_finite() {
            return Err(GeomError::InvalidParameter("non-finite score"));
        }
        let p = s.clamp(SCORE_EPS, 1.0 - SCORE_EPS);
        let (p_t, alpha_t) = if positive {
            (p, cfg.focal_alpha)
        } else {
            (1.0 - p, 1.0 - cfg.focal_alpha)
        };
        let log_pt = math::ln(p_t);
        bce -= log_pt;
        focal -= alpha_t * math::powf(1.0 - p_t, cfg.focal_gamma) * log_pt;
    }
    let n = scores.len() as f64;
    Ok(cfg.alpha * bce / n + cfg.beta * focal / n)
}

/// One positive anchor: predicted and target regression values plus the
/// decoded prediction and its ground-truth contour.
#[derive(Debug, Clone)]
pub struct PositiveSample {
    pub loc_pred: [f64; 2],
    pub loc_target: [f64; 2],
    pub fourier_pred: Vec<f64>,
    pub fourier_target: Vec<f64>,
    pub pred_contour: Contour,
    pub gt_contour: Contour,
}

/// Loss over a batch. `positives` feed the regression and contour terms,
/// `cls_scores`/`cls_labels` hold every non-ignored sample.
pub fn total_loss(
    positives: &[PositiveSample],
    cls_scores: &[f64],
    cls_labels: &[bool],
    cfg: &LossConfig,
) -> Result<LossReport> {
    cfg.validate()?;
    let l_cls = cls_loss(cls_scores, cls_labels, cfg)?;
    if positives.is_empty() {
        return Ok(LossReport {
            l_cls,
            total: l_cls,
            no_positives: true,
            ..LossReport::default()
        });
    }
    let n = positives.len() as f64;
    let mut l_loc = 0.0;
    let mut l_fou = 0.0;
    let mut l_con = 0.0;
    for p in positives {
        l_loc += smooth_l1(&p.loc_pred, &p.loc_target, cfg)?;
        l_fou += smooth_l1(&p.fourier_pred, &p.fourier_target, cfg)?;
        l_con += contour_loss(&p.pred_contour, &p.gt_contour)?;
    }
    let (l_loc, l_fou, l_con) = (l_loc / n, l_fou / n, l_con / n);
    Ok(LossReport {
        l_loc,
        l_fou,
        l_con,
        l_cls,
        total: l_loc + l_fou + l_con + l_cls,
        no_positives: false,
    })
}
