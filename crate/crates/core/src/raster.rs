// SPDX-License-Identifier: Apache-2.0

//! Even-odd scanline rasterization onto a shared grid.

use alloc::vec;
use alloc::vec::Vec;

use crate::contour::{BBox, Contour, Point};
use crate::error::{GeomError, Result};
use crate::math;

pub const DEFAULT_RESOLUTION: usize = 512;
/// Fraction of the union box added on every side by [`GridSpec::covering`].
pub const BOUNDS_MARGIN: f64 = 0.02;

/// Square-cell grid over `bounds`, `resolution` cells along the longer side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub resolution: usize,
    pub bounds: BBox,
}

impl GridSpec {
    pub fn new(bounds: BBox, resolution: usize) -> Result<Self> {
        if resolution < 16 {
            return Err(GeomError::InvalidParameter(
                "grid resolution must be at least 16",
            ));
        }
        let side = bounds.width().max(bounds.height());
        if !side.is_finite() || side <= 0.0 {
            return Err(GeomError::DegenerateContour("grid bounds have zero extent"));
        }
        Ok(GridSpec { resolution, bounds })
    }

    /// Union bounding box of `contours`, grown by 2% per side.
    pub fn covering(contours: &[&Contour], resolution: usize) -> Result<Self> {
        let bounds = contours
            .iter()
            .filter_map(|c| c.bbox())
            .reduce(|a, b| a.union(&b))
            .ok_or(GeomError::DegenerateContour("no vertices"))?;
        GridSpec::new(bounds.expanded(BOUNDS_MARGIN), resolution)
    }

    pub fn cell_size(&self) -> f64 {
        self.bounds.width().max(self.bounds.height()) / self.resolution as f64
    }

    /// Columns and rows.
    pub fn dims(&self) -> (usize, usize) {
        let cell = self.cell_size();
        let nx = (math::ceil(self.bounds.width() / cell - 1e-9) as usize).max(1);
        let ny = (math::ceil(self.bounds.height() / cell - 1e-9) as usize).max(1);
        (nx, ny)
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Point {
        let cell = self.cell_size();
        Point::new(
            self.bounds.min.x + (i as f64 + 0.5) * cell,
            self.bounds.min.y + (j as f64 + 0.5) * cell,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl BitMask {
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn intersection_count(&self, other: &BitMask) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(&a, &b)| a && b)
            .count()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[j * self.width + i]
    }
}

/// Cells whose center is inside `c` under the even-odd rule.
pub fn rasterize(c: &Contour, grid: &GridSpec) -> BitMask {
    let (nx, ny) = grid.dims();
    let mut bits = vec![false; nx * ny];
    let cell = grid.cell_size();
    let x0 = grid.bounds.min.x;
    let pts = &c.points;
    let n = pts.len();
    let mut crossings: Vec<f64> = Vec::new();
    for j in 0..ny {
        let y = grid.cell_center(0, j).y;
        crossings.clear();
        for e in 0..n {
            let p = pts[e];
            let q = pts[(e + 1) % n];
            // Half-open rule counts shared vertices exactly once.
            if (p.y <= y) != (q.y <= y) {
                let t = (y - p.y) / (q.y - p.y);
                crossings.push(p.x + t * (q.x - p.x));
            }
        }
        crossings.sort_by(f64::total_cmp);
        let row = &mut bits[j * nx..(j + 1) * nx];
        for span in crossings.chunks_exact(2) {
            // Cell i is inside when span[0] < x0 + (i + 0.5)·cell ≤ span[1].
            let lo = math::floor((span[0] - x0) / cell - 0.5) + 1.0;
            let hi = math::floor((span[1] - x0) / cell - 0.5);
            let lo = lo.max(0.0);
            let hi = hi.min(nx as f64 - 1.0);
            if hi < lo {
                continue;
            }
            for cell_ref in &mut row[lo as usize..=hi as usize] {
                *cell_ref = !*cell_ref;
            }
        }
    }
    BitMask {
        width: nx,
        height: ny,
        bits,
    }
}
