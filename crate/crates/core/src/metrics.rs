// SPDX-License-Identifier: Apache-2.0

//! Scalar comparisons between two contours.

use alloc::vec;
use alloc::vec::Vec;

use crate::contour::{resample_unchecked, Contour, Point};
use crate::error::{GeomError, Result};
use crate::math;
use crate::raster::{rasterize, GridSpec, DEFAULT_RESOLUTION};

pub const DEFAULT_RAYS: usize = 360;
pub const DEFAULT_HAUSDORFF_SAMPLES: usize = 1000;

/// IoU of the axis-aligned bounding boxes of the two vertex sets.
pub fn box_iou(c1: &Contour, c2: &Contour) -> Result<f64> {
    c1.require_area()?;
    c2.require_area()?;
    Ok(box_iou_unchecked(c1, c2))
}

fn box_iou_unchecked(c1: &Contour, c2: &Contour) -> f64 {
    match (c1.bbox(), c2.bbox()) {
        (Some(a), Some(b)) => a.iou(&b),
        _ => 0.0,
    }
}

/// Ray-based IoU: `Σ min(d1, d2) / Σ max(d1, d2)` over `rays` directions from
/// the midpoint of the two centroids, where `d` is the farthest boundary hit
/// along each ray (0 when the ray misses).
pub fn polar_iou(c1: &Contour, c2: &Contour, rays: usize) -> Result<f64> {
    if rays == 0 {
        return Err(GeomError::InvalidParameter("ray count must be positive"));
    }
    let (g1, _) = c1.require_area()?;
    let (g2, _) = c2.require_area()?;
    let center = Point::new(0.5 * (g1.x + g2.x), 0.5 * (g1.y + g2.y));
    let dirs = RayFan::new(rays);
    let d1 = dirs.profile(&c1.points, center);
    let d2 = dirs.profile(&c2.points, center);
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in d1.iter().zip(&d2) {
        num += a.min(*b);
        den += a.max(*b);
    }
    if den <= 0.0 {
        return Err(GeomError::DegeneratePair);
    }
    Ok((num / den).clamp(0.0, 1.0))
}

/// `polar_iou · box_iou`. Disjoint boxes short-circuit to 0.
pub fn combined_iou(c1: &Contour, c2: &Contour) -> Result<f64> {
    combined_iou_with(c1, c2, DEFAULT_RAYS)
}

pub fn combined_iou_with(c1: &Contour, c2: &Contour, rays: usize) -> Result<f64> {
    let b = box_iou(c1, c2)?;
    if b == 0.0 {
        return Ok(0.0);
    }
    Ok(polar_iou(c1, c2, rays)? * b)
}

/// `2|A∩B| / (|A| + |B|)` over masks rasterized on `grid`.
pub fn dice(c1: &Contour, c2: &Contour, grid: &GridSpec) -> Result<f64> {
    let m1 = rasterize(c1, grid);
    let m2 = rasterize(c2, grid);
    let (n1, n2) = (m1.count(), m2.count());
    if n1 == 0 || n2 == 0 {
        return Err(GeomError::EmptyRegion);
    }
    Ok(2.0 * m1.intersection_count(&m2) as f64 / (n1 + n2) as f64)
}

/// [`dice`] on the 2%-margin covering grid at the default resolution.
pub fn dice_default(c1: &Contour, c2: &Contour) -> Result<f64> {
    let grid = GridSpec::covering(&[c1, c2], DEFAULT_RESOLUTION)?;
    dice(c1, c2, &grid)
}

/// Symmetric Hausdorff distance between the boundaries, each resampled to
/// `samples` arc-length-uniform points.
pub fn hausdorff(c1: &Contour, c2: &Contour, samples: usize) -> Result<f64> {
    if samples == 0 {
        return Err(GeomError::InvalidParameter("sample count must be positive"));
    }
    if c1.len() < 2 || c2.len() < 2 {
        return Err(GeomError::DegenerateContour("fewer than 2 vertices"));
    }
    let a = resample_unchecked(&c1.points, samples);
    let b = resample_unchecked(&c2.points, samples);
    Ok(directed_hausdorff(&a, &b).max(directed_hausdorff(&b, &a)))
}

fn directed_hausdorff(from: &[Point], to: &[Point]) -> f64 {
    let mut worst = 0.0f64;
    for p in from {
        let mut best = f64::INFINITY;
        for q in to {
            let dx = p.x - q.x;
            let dy = p.y - q.y;
            let d2 = dx * dx + dy * dy;
            if d2 < best {
                best = d2;
                // Cannot raise the running maximum any further.
                if best <= worst {
                    break;
                }
            }
        }
        worst = worst.max(best);
    }
    math::sqrt(worst)
}

/// `(3·dice − 2) / dice`.
pub fn conformity(dice_value: f64) -> Result<f64> {
    if dice_value == 0.0 || !dice_value.is_finite() {
        return Err(GeomError::Undefined("conformity of zero dice"));
    }
    Ok((3.0 * dice_value - 2.0) / dice_value)
}

/// Unit directions for a fan of uniformly spaced rays.
pub(crate) struct RayFan {
    dirs: Vec<Point>,
}

impl RayFan {
    pub(crate) fn new(rays: usize) -> Self {
        let dirs = (0..rays)
            .map(|j| {
                let (s, c) = math::sin_cos(math::TAU * j as f64 / rays as f64);
                Point::new(c, s)
            })
            .collect();
        RayFan { dirs }
    }

    /// Farthest boundary distance along every ray from `center`.
    ///
    /// Each edge only visits the rays inside the angle it subtends, so the
    /// cost is `O(edges + rays · crossings)`.
    pub(crate) fn profile(&self, pts: &[Point], center: Point) -> Vec<f64> {
        let k = self.dirs.len();
        let step = math::TAU / k as f64;
        let mut dist = vec![0.0f64; k];
        let n = pts.len();
        for e in 0..n {
            let u = pts[e].sub(center);
            let v = pts[(e + 1) % n].sub(center);
            let cr = u.cross(v);
            let dot = u.x * v.x + u.y * v.y;
            let scale = math::hypot(u.x, u.y) * math::hypot(v.x, v.y);
            if cr.abs() <= 1e-14 * scale {
                // Edge lies on a line through the center; the neighbouring
                // edges report its endpoints.
                continue;
            }
            let (start, span) = if cr > 0.0 {
                (math::atan2(u.y, u.x), math::atan2(cr, dot))
            } else {
                (math::atan2(v.y, v.x), math::atan2(-cr, dot))
            };
            let start = if start < 0.0 {
                start + math::TAU
            } else {
                start
            };
            let first = math::ceil(start / step - 1e-9) as i64;
            let last = math::floor((start + span) / step + 1e-9) as i64;
            let edge_dir = v.sub(u);
            for j in first..=last {
                let idx = j.rem_euclid(k as i64) as usize;
                let w = self.dirs[idx];
                let denom = w.cross(edge_dir);
                if denom == 0.0 {
                    continue;
                }
                let t = cr / denom;
                if t.is_finite() && t > dist[idx] {
                    dist[idx] = t;
                }
            }
        }
        dist
    }
}
