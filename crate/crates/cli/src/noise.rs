// SPDX-License-Identifier: Apache-2.0

//! Simulated detector proposals: Gaussian jitter around a ground truth.

use fcontour_core::csr::ScoredProposal;
use fcontour_core::efd::{efd_decode, DEFAULT_DECODE_SAMPLES};
use fcontour_core::metrics::combined_iou;
use fcontour_core::{FourierDescriptor, Harmonic, Point};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    /// Coefficient std as a fraction of the first-harmonic amplitude.
    pub coeff_sigma: f64,
    /// Centre std in pixels.
    pub center_sigma: f64,
    pub proposals_per_gt: usize,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            coeff_sigma: 0.1,
            center_sigma: 0.0,
            proposals_per_gt: 20,
            seed: 0,
        }
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |s: f64| s.is_finite() && s >= 0.0;
        if !ok(self.coeff_sigma) || !ok(self.center_sigma) {
            return Err(Error::Invalid(
                "noise sigmas must be finite and non-negative".into(),
            ));
        }
        if self.proposals_per_gt == 0 {
            return Err(Error::Invalid("proposals_per_gt must be at least 1".into()));
        }
        Ok(())
    }
}

/// `proposals_per_gt` noisy copies of `gt`, each scored by its combined IoU
/// with `gt`. Proposals carry `gt`'s class through `class_id`.
pub fn simulate_proposals(
    gt: &FourierDescriptor,
    class_id: u32,
    cfg: &NoiseConfig,
) -> Result<Vec<ScoredProposal>> {
    cfg.validate()?;
    gt.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let coeff = Normal::new(0.0, cfg.coeff_sigma * gt.first_harmonic_amplitude())
        .map_err(|e| Error::Invalid(format!("coefficient noise: {e}")))?;
    let center = Normal::new(0.0, cfg.center_sigma)
        .map_err(|e| Error::Invalid(format!("centre noise: {e}")))?;
    let gt_contour = efd_decode(gt, DEFAULT_DECODE_SAMPLES)?;

    let mut out = Vec::with_capacity(cfg.proposals_per_gt);
    for _ in 0..cfg.proposals_per_gt {
        let harmonics = gt
            .harmonics
            .iter()
            .map(|h| Harmonic {
                a: h.a + coeff.sample(&mut rng),
                b: h.b + coeff.sample(&mut rng),
                c: h.c + coeff.sample(&mut rng),
                d: h.d + coeff.sample(&mut rng),
            })
            .collect();
        let c = Point::new(
            gt.center.x + center.sample(&mut rng),
            gt.center.y + center.sample(&mut rng),
        );
        let mut descriptor = FourierDescriptor::new(c, harmonics);
        descriptor.period_samples = gt.period_samples;
        let contour = efd_decode(&descriptor, DEFAULT_DECODE_SAMPLES)?;
        let score = combined_iou(&contour, &gt_contour)?;
        out.push(ScoredProposal {
            descriptor,
            score,
            class_id,
        });
    }
    Ok(out)
}
