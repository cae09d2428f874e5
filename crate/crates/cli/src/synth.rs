// SPDX-License-Identifier: Apache-2.0

//! Seeded synthetic contours drawn from the truncated Fourier model.

use fcontour_core::efd::efd_decode;
use fcontour_core::{Contour, FourierDescriptor, Harmonic, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Draws per item before giving up.
pub const MAX_REJECTIONS: usize = 1000;
/// Points per generated contour.
pub const SYNTH_SAMPLES: usize = 360;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub count: usize,
    pub n_harmonics: usize,
    pub base_radius: f64,
    /// Harmonic `i` coefficients are drawn from `±base_radius / i^decay_power`.
    pub decay_power: f64,
    pub image_size: (f64, f64),
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            count: 100,
            n_harmonics: 7,
            base_radius: 60.0,
            decay_power: 2.0,
            image_size: (416.0, 416.0),
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Invalid("count must be at least 1".into()));
        }
        if self.n_harmonics == 0 || self.n_harmonics > 7 {
            return Err(Error::Invalid("n_harmonics must lie in 1..=7".into()));
        }
        if !(self.base_radius.is_finite() && self.base_radius > 0.0) {
            return Err(Error::Invalid("base_radius must be positive".into()));
        }
        if self.decay_power.is_nan() || self.decay_power < 0.0 {
            return Err(Error::Invalid("decay_power must be non-negative".into()));
        }
        if !(self.image_size.0 > 0.0 && self.image_size.1 > 0.0) {
            return Err(Error::Invalid("image size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthItem {
    pub contour: Contour,
    pub descriptor: FourierDescriptor,
}

/// Generate `cfg.count` simple, in-bounds contours. Same seed, same output.
pub fn synth_dataset(cfg: &SynthConfig) -> Result<Vec<SynthItem>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.count)
        .map(|item| synth_item(cfg, item, &mut rng))
        .collect()
}

fn synth_item(cfg: &SynthConfig, item: usize, rng: &mut ChaCha8Rng) -> Result<SynthItem> {
    let r = cfg.base_radius;
    let (w, h) = cfg.image_size;
    for _ in 0..MAX_REJECTIONS {
        let mut harmonics: Vec<Harmonic> = (1..=cfg.n_harmonics)
            .map(|i| {
                let bound = r / (i as f64).powf(cfg.decay_power);
                let mut draw = || {
                    if bound > 0.0 {
                        rng.random_range(-bound..=bound)
                    } else {
                        0.0
                    }
                };
                Harmonic {
                    a: draw(),
                    b: draw(),
                    c: draw(),
                    d: draw(),
                }
            })
            .collect();
        lift_first_harmonic(&mut harmonics[0], 0.5 * r);

        let shape = FourierDescriptor::new(Point::default(), harmonics);
        let local = efd_decode(&shape, SYNTH_SAMPLES)?;
        let bb = local.bbox().expect("decoded contour has points");
        // Centre range that keeps the whole contour inside the image.
        let (x_lo, x_hi) = (-bb.min.x, w - bb.max.x);
        let (y_lo, y_hi) = (-bb.min.y, h - bb.max.y);
        let cx = rng.random::<f64>();
        let cy = rng.random::<f64>();
        if x_lo > x_hi || y_lo > y_hi {
            continue;
        }
        if !is_simple(&local.points) {
            continue;
        }
        let center = Point::new(x_lo + cx * (x_hi - x_lo), y_lo + cy * (y_hi - y_lo));
        let mut descriptor = shape.with_center(center);
        descriptor.period_samples = SYNTH_SAMPLES;
        let contour = efd_decode(&descriptor, SYNTH_SAMPLES)?;
        if !in_bounds(&contour, w, h) {
            continue;
        }
        return Ok(SynthItem {
            contour,
            descriptor,
        });
    }
    Err(Error::GenerationFailure {
        item,
        attempts: MAX_REJECTIONS,
    })
}

/// Raise the x and y amplitudes of the first level to at least `min_amp`.
fn lift_first_harmonic(h: &mut Harmonic, min_amp: f64) {
    let ax = h.amplitude_x();
    if ax < min_amp {
        if ax > 0.0 {
            h.a *= min_amp / ax;
            h.b *= min_amp / ax;
        } else {
            h.b = min_amp;
        }
    }
    let ay = h.amplitude_y();
    if ay < min_amp {
        if ay > 0.0 {
            h.c *= min_amp / ay;
            h.d *= min_amp / ay;
        } else {
            h.c = min_amp;
        }
    }
}

fn in_bounds(c: &Contour, w: f64, h: f64) -> bool {
    c.points
        .iter()
        .all(|p| (0.0..=w).contains(&p.x) && (0.0..=h).contains(&p.y))
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_touch(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// True when no two non-adjacent edges of the closed polygon meet and no
/// vertex repeats.
pub fn is_simple(points: &[Point]) -> bool {
    let n = points.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a1, a2) = (points[i], points[(i + 1) % n]);
        if a1 == a2 {
            return false;
        }
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (b1, b2) = (points[j], points[(j + 1) % n]);
            // Cheap box rejection first.
            if a1.x.max(a2.x) < b1.x.min(b2.x)
                || b1.x.max(b2.x) < a1.x.min(a2.x)
                || a1.y.max(a2.y) < b1.y.min(b2.y)
                || b1.y.max(b2.y) < a1.y.min(a2.y)
            {
                continue;
            }
            if segments_touch(a1, a2, b1, b2) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_eight_is_not_simple() {
        let pts: Vec<Point> = (0..100)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / 100.0;
                Point::new(t.sin(), (2.0 * t).sin() * 0.5)
            })
            .collect();
        assert!(!is_simple(&pts));
        let square = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert!(is_simple(&square));
    }

    #[test]
    fn same_seed_same_data() {
        let cfg = SynthConfig {
            count: 5,
            seed: 42,
            ..SynthConfig::default()
        };
        assert_eq!(synth_dataset(&cfg).unwrap(), synth_dataset(&cfg).unwrap());
        let other = SynthConfig { seed: 43, ..cfg };
        assert_ne!(synth_dataset(&cfg).unwrap(), synth_dataset(&other).unwrap());
    }

    #[test]
    fn infinite_decay_gives_ellipses() {
        let cfg = SynthConfig {
            count: 10,
            decay_power: f64::INFINITY,
            seed: 3,
            ..SynthConfig::default()
        };
        for item in synth_dataset(&cfg).unwrap() {
            assert!(item.descriptor.harmonics[1..]
                .iter()
                .all(|h| h.to_array() == [0.0; 4]));
        }
    }

    #[test]
    fn generation_failure_when_it_cannot_fit() {
        let cfg = SynthConfig {
            count: 1,
            base_radius: 500.0,
            image_size: (50.0, 50.0),
            ..SynthConfig::default()
        };
        assert!(matches!(
            synth_dataset(&cfg),
            Err(Error::GenerationFailure { .. })
        ));
    }
}
