// SPDX-License-Identifier: Apache-2.0

//! Closed polygons and the canonical parameterization used by the codec.

use alloc::vec::Vec;

use crate::error::{GeomError, Result};
use crate::math;

/// Area below which a polygon is treated as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-9;
/// Minimum separation between consecutive vertices of a valid contour.
pub const MIN_VERTEX_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        math::hypot(self.x - other.x, self.y - other.y)
    }

    #[inline]
    pub(crate) fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    #[inline]
    pub(crate) fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub(crate) fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

/// Axis-aligned box, `min` inclusive to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn of_points(points: &[Point]) -> Option<BBox> {
        let first = *points.first()?;
        let mut bb = BBox {
            min: first,
            max: first,
        };
        for p in &points[1..] {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            min: Point::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            max: Point::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        }
    }

    pub fn intersection_area(&self, other: &BBox) -> f64 {
        let w = self.max.x.min(other.max.x) - self.min.x.max(other.min.x);
        let h = self.max.y.min(other.max.y) - self.min.y.max(other.min.y);
        if w <= 0.0 || h <= 0.0 {
            0.0
        } else {
            w * h
        }
    }

    pub fn iou(&self, other: &BBox) -> f64 {
        let inter = self.intersection_area(other);
        if inter == 0.0 {
            return 0.0;
        }
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            (inter / union).clamp(0.0, 1.0)
        }
    }

    /// Grow every side by `fraction` of the box's own width/height.
    pub fn expanded(&self, fraction: f64) -> BBox {
        let dx = self.width() * fraction;
        let dy = self.height() * fraction;
        BBox {
            min: Point::new(self.min.x - dx, self.min.y - dy),
            max: Point::new(self.max.x + dx, self.max.y + dy),
        }
    }

    pub fn clip(&self, width: f64, height: f64) -> BBox {
        BBox {
            min: Point::new(self.min.x.clamp(0.0, width), self.min.y.clamp(0.0, height)),
            max: Point::new(self.max.x.clamp(0.0, width), self.max.y.clamp(0.0, height)),
        }
    }
}

/// Ordered closed polygon. The last vertex implicitly connects to the first.
///
/// Construction through [`Contour::new`] does not validate; decoded contours
/// may legitimately collapse to a point and are rejected by the operations
/// that need a proper polygon. Use [`Contour::validated`] at ingestion.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub points: Vec<Point>,
    pub class_id: u32,
}

impl Contour {
    pub fn new(points: Vec<Point>, class_id: u32) -> Self {
        Contour { points, class_id }
    }

    pub fn validated(points: Vec<Point>, class_id: u32) -> Result<Self> {
        let c = Contour::new(points, class_id);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.points.len();
        if n < 3 {
            return Err(GeomError::DegenerateContour("fewer than 3 vertices"));
        }
        if self
            .points
            .iter()
            .any(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(GeomError::DegenerateContour("non-finite vertex"));
        }
        for i in 0..n {
            if self.points[i].dist(self.points[(i + 1) % n]) <= MIN_VERTEX_GAP {
                return Err(GeomError::DegenerateContour(
                    "coincident consecutive vertices",
                ));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bbox(&self) -> Option<BBox> {
        BBox::of_points(&self.points)
    }

    pub fn perimeter(&self) -> f64 {
        edges(&self.points).map(|(p, q)| p.dist(q)).sum()
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Contour {
        let points = self
            .points
            .iter()
            .map(|p| Point::new(p.x + dx, p.y + dy))
            .collect();
        Contour::new(points, self.class_id)
    }

    pub fn scaled(&self, s: f64) -> Contour {
        let points = self
            .points
            .iter()
            .map(|p| Point::new(p.x * s, p.y * s))
            .collect();
        Contour::new(points, self.class_id)
    }

    pub fn reversed(&self) -> Contour {
        let mut points = self.points.clone();
        points.reverse();
        Contour::new(points, self.class_id)
    }

    /// Error unless the polygon encloses a non-negligible area.
    pub(crate) fn require_area(&self) -> Result<(Point, f64)> {
        if self.points.len() < 3 {
            return Err(GeomError::DegenerateContour("fewer than 3 vertices"));
        }
        let (centroid, area) = centroid_area(self);
        if !area.is_finite() || area.abs() < DEGENERATE_AREA {
            return Err(GeomError::DegenerateContour("zero enclosed area"));
        }
        Ok((centroid, area))
    }
}

pub(crate) fn edges(points: &[Point]) -> impl Iterator<Item = (Point, Point)> + '_ {
    let n = points.len();
    (0..n).map(move |i| (points[i], points[(i + 1) % n]))
}

/// Shoelace signed area (positive for counter-clockwise in the x-right,
/// y-up frame) and polygon centroid.
///
/// For a zero-area polygon the centroid falls back to the vertex mean.
pub fn centroid_area(c: &Contour) -> (Point, f64) {
    let pts = &c.points;
    if pts.is_empty() {
        return (Point::default(), 0.0);
    }
    // Work relative to the first vertex to keep the products small.
    let origin = pts[0];
    let mut twice_area = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for (p, q) in edges(pts) {
        let p = p.sub(origin);
        let q = q.sub(origin);
        let w = p.cross(q);
        twice_area += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    let area = 0.5 * twice_area;
    if area.abs() < 1e-300 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.x).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.y).sum::<f64>() / n;
        return (Point::new(mx, my), area);
    }
    let centroid = Point::new(
        origin.x + cx / (3.0 * twice_area),
        origin.y + cy / (3.0 * twice_area),
    );
    (centroid, area)
}

/// Counter-clockwise orientation, starting at the farthest boundary point hit
/// by the ray from the centroid along +x (the rightmost crossing of the
/// centroid's horizontal line if the ray misses). The hit is inserted as a
/// vertex when it is not one already. Idempotent.
pub fn canonicalize(c: &Contour) -> Result<Contour> {
    let (centroid, area) = c.require_area()?;
    let mut pts = c.points.clone();
    if area < 0.0 {
        pts.reverse();
    }

    let n = pts.len();
    let mut best: Option<(f64, usize)> = None;
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let lo = p.y.min(q.y);
        let hi = p.y.max(q.y);
        if centroid.y < lo || centroid.y > hi {
            continue;
        }
        let x = if p.y == q.y {
            p.x.max(q.x)
        } else {
            let t = (centroid.y - p.y) / (q.y - p.y);
            p.x + (q.x - p.x) * t
        };
        if best.is_none_or(|(bx, _)| x > bx) {
            best = Some((x, i));
        }
    }
    // Rightmost crossing of the centroid's horizontal line. This is the
    // farthest +x hit whenever one exists, and still defined when the
    // centroid lies outside a non-convex contour with nothing to its right.
    let (hit_x, edge) = best.ok_or(GeomError::DegenerateContour("no +x ray intersection"))?;
    let hit = Point::new(hit_x, centroid.y);

    let snap = 1e-9 * (1.0 + hit_x.abs().max(centroid.y.abs()));
    let start = if let Some(k) = pts.iter().position(|p| p.dist(hit) <= snap) {
        k
    } else {
        pts.insert(edge + 1, hit);
        edge + 1
    };
    pts.rotate_left(start);
    Ok(Contour::new(pts, c.class_id))
}

/// `count` points spaced uniformly by arc length, starting at vertex 0.
///
/// Apply to a canonical contour to get the canonical sampling used by
/// [`crate::efd::efd_encode`].
pub fn resample(c: &Contour, count: usize) -> Result<Vec<Point>> {
    if count < 3 {
        return Err(GeomError::InvalidParameter(
            "resample count must be at least 3",
        ));
    }
    c.require_area()?;
    Ok(resample_unchecked(&c.points, count))
}

/// Arc-length resampling without the area check (used for boundaries that
/// only need a point cloud, e.g. Hausdorff distance).
pub(crate) fn resample_unchecked(pts: &[Point], count: usize) -> Vec<Point> {
    let n = pts.len();
    let mut cumulative = Vec::with_capacity(n + 1);
    cumulative.push(0.0);
    let mut total = 0.0;
    for (p, q) in edges(pts) {
        total += p.dist(q);
        cumulative.push(total);
    }
    let mut out = Vec::with_capacity(count);
    let mut edge = 0;
    for i in 0..count {
        let s = total * (i as f64) / (count as f64);
        while edge + 1 < n && cumulative[edge + 1] <= s {
            edge += 1;
        }
        let len = cumulative[edge + 1] - cumulative[edge];
        let t = if len > 0.0 {
            ((s - cumulative[edge]) / len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push(pts[edge].lerp(pts[(edge + 1) % n], t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn square_ccw() -> Contour {
        Contour::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ],
            0,
        )
    }

    #[test]
    fn unit_square_area_and_centroid() {
        let (c, a) = centroid_area(&square_ccw());
        assert!((a - 1.0).abs() < 1e-15);
        assert!((c.x - 0.5).abs() < 1e-15 && (c.y - 0.5).abs() < 1e-15);
        let (_, a) = centroid_area(&square_ccw().reversed());
        assert!((a + 1.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_centroid() {
        let t = Contour::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(2.0, 0.0),
                Point::new(0.0, 2.0),
            ],
            0,
        );
        let (c, a) = centroid_area(&t);
        assert!((a - 2.0).abs() < 1e-15);
        assert!((c.x - 2.0 / 3.0).abs() < 1e-15);
        assert!((c.y - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn canonicalize_flips_clockwise_square() {
        let cw = square_ccw().reversed();
        let c = canonicalize(&cw).unwrap();
        assert!(centroid_area(&c).1 > 0.0);
        assert_eq!(c.points[0], Point::new(1.0, 0.5));
        assert_eq!(c.len(), 5);
        assert_eq!(c.points[1], Point::new(1.0, 1.0));
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let c = canonicalize(&square_ccw().reversed()).unwrap();
        assert_eq!(canonicalize(&c).unwrap(), c);
    }

    #[test]
    fn canonical_start_when_centroid_ray_misses() {
        // C shape opening to +x; centroid sits in the gap at (3.71, 5).
        let c = Contour::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(10.0, 0.0),
                Point::new(10.0, 1.0),
                Point::new(1.0, 1.0),
                Point::new(1.0, 9.0),
                Point::new(10.0, 9.0),
                Point::new(10.0, 10.0),
                Point::new(0.0, 10.0),
            ],
            0,
        );
        let k = canonicalize(&c).unwrap();
        assert_eq!(k.points[0], Point::new(1.0, 5.0));
        assert_eq!(canonicalize(&k).unwrap(), k);
    }

    #[test]
    fn collinear_triangle_is_degenerate() {
        let t = Contour::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(2.0, 2.0),
            ],
            0,
        );
        assert!(matches!(
            canonicalize(&t),
            Err(GeomError::DegenerateContour(_))
        ));
    }

    #[test]
    fn resample_square_spacing() {
        let pts = resample(&square_ccw(), 4).unwrap();
        for i in 0..4 {
            let d = pts[i].dist(pts[(i + 1) % 4]);
            assert!((d - 1.0).abs() < 1e-12, "{d}");
        }
        assert_eq!(pts[0], Point::new(0.0, 0.0));
    }

    #[test]
    fn resample_three_points_at_thirds() {
        let pts = resample(&square_ccw(), 3).unwrap();
        // perimeter 4: arc lengths 0, 4/3, 8/3
        assert_eq!(pts[0], Point::new(0.0, 0.0));
        assert!(pts[1].dist(Point::new(1.0, 1.0 / 3.0)) < 1e-12);
        assert!(pts[2].dist(Point::new(1.0 / 3.0, 1.0)) < 1e-12);
    }

    #[test]
    fn resample_circle_radius() {
        let r = 3.0;
        let pts: Vec<Point> = (0..360)
            .map(|i| {
                let (s, c) = math::sin_cos(math::TAU * i as f64 / 360.0);
                Point::new(5.0 + r * c, -2.0 + r * s)
            })
            .collect();
        let circle = canonicalize(&Contour::new(pts, 0)).unwrap();
        for p in resample(&circle, 360).unwrap() {
            assert!((p.dist(Point::new(5.0, -2.0)) - r).abs() < 1e-3);
        }
    }

    #[test]
    fn validation_rejects_duplicates() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ];
        assert!(Contour::validated(pts, 0).is_err());
    }
}
