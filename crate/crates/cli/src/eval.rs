// SPDX-License-Identifier: Apache-2.0

//! Dataset-level metric tables over index-paired contour lists.

use fcontour_core::metrics::{
    combined_iou, conformity, dice_default, hausdorff, DEFAULT_HAUSDORFF_SAMPLES,
};
use fcontour_core::{Contour, GeomError};

use crate::error::{Error, Result};
use crate::parallel::par_map;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl Stat {
    /// Mean and population std. The values are sorted first so the result
    /// does not depend on their order.
    pub fn of(values: &[f64]) -> Option<Stat> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let mean = neumaier(v.iter().copied()) / n;
        let var = neumaier(v.iter().map(|x| (x - mean) * (x - mean))) / n;
        Some(Stat {
            mean,
            std: var.max(0.0).sqrt(),
        })
    }
}

fn neumaier(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Metrics of one prediction/ground-truth pair. Ratios are in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMetrics {
    pub dice: f64,
    pub iou: f64,
    pub hd: f64,
    pub conf: f64,
}

pub fn pair_metrics(pred: &Contour, gt: &Contour) -> std::result::Result<PairMetrics, GeomError> {
    let dice = dice_default(pred, gt)?;
    Ok(PairMetrics {
        dice,
        iou: combined_iou(pred, gt)?,
        hd: hausdorff(pred, gt, DEFAULT_HAUSDORFF_SAMPLES)?,
        conf: conformity(dice)?,
    })
}

/// Mean and std of DICE %, IoU %, HD (input units) and Conf %.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsTable {
    pub dice: Stat,
    pub iou: Stat,
    pub hd: Stat,
    pub conf: Stat,
    /// Pairs that entered the table.
    pub count: usize,
    /// Indices of pairs dropped because a metric was undefined for them.
    pub excluded: Vec<usize>,
}

impl MetricsTable {
    /// `(name, stat)` rows in CSV order.
    pub fn stats(&self) -> [(&'static str, Stat); 4] {
        [
            ("DICE", self.dice),
            ("IoU", self.iou),
            ("HD", self.hd),
            ("Conf", self.conf),
        ]
    }

    pub fn from_pairs(results: &[std::result::Result<PairMetrics, GeomError>]) -> Result<Self> {
        let mut ok = Vec::with_capacity(results.len());
        let mut excluded = Vec::new();
        for (i, r) in results.iter().enumerate() {
            match r {
                Ok(m) => ok.push(*m),
                Err(_) => excluded.push(i),
            }
        }
        let column = |f: fn(&PairMetrics) -> f64, scale: f64| {
            let values: Vec<f64> = ok.iter().map(|m| f(m) * scale).collect();
            Stat::of(&values)
        };
        let missing =
            || Error::Invalid(format!("no evaluable pairs ({} excluded)", excluded.len()));
        Ok(MetricsTable {
            dice: column(|m| m.dice, 100.0).ok_or_else(missing)?,
            iou: column(|m| m.iou, 100.0).ok_or_else(missing)?,
            hd: column(|m| m.hd, 1.0).ok_or_else(missing)?,
            conf: column(|m| m.conf, 100.0).ok_or_else(missing)?,
            count: ok.len(),
            excluded,
        })
    }
}

/// Evaluate index-paired lists on `workers` threads (0 = all cores).
pub fn evaluate(preds: &[Contour], gts: &[Contour], workers: usize) -> Result<MetricsTable> {
    if preds.len() != gts.len() {
        return Err(Error::Pairing {
            preds: preds.len(),
            gts: gts.len(),
        });
    }
    let pairs: Vec<(&Contour, &Contour)> = preds.iter().zip(gts).collect();
    let results = par_map(workers, &pairs, |(p, g)| pair_metrics(p, g))?;
    MetricsTable::from_pairs(&results)
}
