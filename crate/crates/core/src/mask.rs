// SPDX-License-Identifier: Apache-2.0

//! Label masks and marching-squares boundary extraction.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::contour::{canonicalize, centroid_area, Contour, Point};
use crate::error::{GeomError, Result};

/// Components enclosing less than this many square pixels are dropped.
pub const MIN_COMPONENT_AREA: f64 = 4.0;

/// Row-major grid of class labels, 0 is background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMask {
    pub width: usize,
    pub height: usize,
    pub values: Vec<u16>,
}

impl LabelMask {
    pub fn new(width: usize, height: usize, values: Vec<u16>) -> Result<Self> {
        if values.len() != width * height {
            return Err(GeomError::ShapeMismatch {
                expected: width * height,
                got: values.len(),
            });
        }
        Ok(LabelMask {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: usize, height: usize, value: u16) -> Self {
        LabelMask {
            width,
            height,
            values: alloc::vec![value; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u16) {
        self.values[y * self.width + x] = v;
    }

    /// Distinct non-background labels in ascending order.
    pub fn classes(&self) -> Vec<u16> {
        let mut seen: Vec<u16> = self.values.iter().copied().filter(|&v| v != 0).collect();
        seen.sort_unstable();
        seen.dedup();
        seen
    }

    /// Indicator sample with an implicit background border.
    fn inside(&self, x: isize, y: isize, class_id: u16) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.get(x as usize, y as usize) == class_id
    }
}

/// Crossing location on the sample lattice: a horizontal edge joins samples
/// `(x, y)` and `(x+1, y)`, a vertical edge joins `(x, y)` and `(x, y+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EdgeKey {
    H(isize, isize),
    V(isize, isize),
}

impl EdgeKey {
    /// Iso-crossing point in pixel coordinates. Samples sit at pixel centers
    /// and the binary indicator crosses 0.5 halfway between them.
    fn point(self) -> Point {
        match self {
            EdgeKey::H(x, y) => Point::new(x as f64 + 1.0, y as f64 + 0.5),
            EdgeKey::V(x, y) => Point::new(x as f64 + 0.5, y as f64 + 1.0),
        }
    }
}

/// Boundaries of every 4-connected component of `class_id`, canonicalized and
/// ordered by decreasing area. Holes are not represented.
pub fn extract_contours(mask: &LabelMask, class_id: u16) -> Vec<Contour> {
    let mut next: BTreeMap<EdgeKey, EdgeKey> = BTreeMap::new();
    let w = mask.width as isize;
    let h = mask.height as isize;
    for cy in -1..h {
        for cx in -1..w {
            // Cell corners counter-clockwise in the x-right, y-up frame.
            let corners = [(cx, cy), (cx + 1, cy), (cx + 1, cy + 1), (cx, cy + 1)];
            let inside = corners.map(|(x, y)| mask.inside(x, y, class_id));
            if inside.iter().all(|&b| b) || inside.iter().all(|&b| !b) {
                continue;
            }
            let side = [
                EdgeKey::H(cx, cy),
                EdgeKey::V(cx + 1, cy),
                EdgeKey::H(cx, cy + 1),
                EdgeKey::V(cx, cy),
            ];
            // Segments run from an in→out side to the nearest preceding out→in
            // side, keeping the region on the left. Saddles split, so diagonal
            // neighbours stay separate components.
            for k in 0..4 {
                if inside[k] && !inside[(k + 1) % 4] {
                    let mut j = (k + 3) % 4;
                    while !(!inside[j] && inside[(j + 1) % 4]) {
                        j = (j + 3) % 4;
                    }
                    next.insert(side[k], side[j]);
                }
            }
        }
    }

    let mut contours = Vec::new();
    while let Some((&start, _)) = next.iter().next() {
        let mut pts = Vec::new();
        let mut key = start;
        while let Some(to) = next.remove(&key) {
            pts.push(key.point());
            key = to;
        }
        let loop_pts = drop_collinear(pts);
        if loop_pts.len() < 3 {
            continue;
        }
        let c = Contour::new(loop_pts, u32::from(class_id));
        // Positive loops are outer boundaries, negative ones are holes.
        let (_, area) = centroid_area(&c);
        if area < MIN_COMPONENT_AREA {
            continue;
        }
        if let Ok(canonical) = canonicalize(&c) {
            contours.push((area, canonical));
        }
    }
    contours.sort_by(|a, b| b.0.total_cmp(&a.0));
    contours.into_iter().map(|(_, c)| c).collect()
}

fn drop_collinear(pts: Vec<Point>) -> Vec<Point> {
    let n = pts.len();
    if n < 3 {
        return pts;
    }
    (0..n)
        .filter(|&i| {
            let prev = pts[(i + n - 1) % n];
            let next = pts[(i + 1) % n];
            pts[i].sub(prev).cross(next.sub(pts[i])).abs() > 1e-12
        })
        .map(|i| pts[i])
        .collect()
}
