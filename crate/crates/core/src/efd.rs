// SPDX-License-Identifier: Apache-2.0

//! Truncated Fourier series codec for closed contours.
//!
//! A contour sampled at `T` points is modelled as
//!
//! ```text
//! x(t) = Lx + Σ_{n=1..N} a_n·sin(2πnt/T) + b_n·cos(2πnt/T)
//! y(t) = Ly + Σ_{n=1..N} c_n·sin(2πnt/T) + d_n·cos(2πnt/T)
//! ```
//!
//! Note that `a_n` pairs with the sine term for `x`, the reverse of the
//! classical Kuhl–Giardina layout. Encoding is a discrete projection onto this
//! basis, which is the exact least-squares fit whenever `T ≥ 2N + 1`.

use alloc::vec;
use alloc::vec::Vec;

use crate::contour::{canonicalize, resample, Contour, Point};
use crate::error::{GeomError, Result};
use crate::math;

pub const DEFAULT_HARMONICS: usize = 7;
pub const DEFAULT_ENCODE_SAMPLES: usize = 360;
pub const DEFAULT_DECODE_SAMPLES: usize = 128;

/// Coefficients of one harmonic level: `x += a·sin + b·cos`, `y += c·sin + d·cos`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Harmonic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Harmonic {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Harmonic { a, b, c, d }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn from_array([a, b, c, d]: [f64; 4]) -> Self {
        Harmonic { a, b, c, d }
    }

    /// Amplitude of the x component, `√(a² + b²)`.
    pub fn amplitude_x(&self) -> f64 {
        math::hypot(self.a, self.b)
    }

    /// Amplitude of the y component, `√(c² + d²)`.
    pub fn amplitude_y(&self) -> f64 {
        math::hypot(self.c, self.d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierDescriptor {
    pub center: Point,
    pub harmonics: Vec<Harmonic>,
    /// Sample count used when the descriptor was encoded (0 when unknown).
    pub period_samples: usize,
}

impl FourierDescriptor {
    pub fn new(center: Point, harmonics: Vec<Harmonic>) -> Self {
        FourierDescriptor {
            center,
            harmonics,
            period_samples: 0,
        }
    }

    pub fn zeros(center: Point, n: usize) -> Self {
        FourierDescriptor::new(center, vec![Harmonic::default(); n])
    }

    /// Axis-aligned ellipse with semi-axes `(rx, ry)`, traversed
    /// counter-clockwise from `(cx + rx, cy)`.
    pub fn ellipse(center: Point, rx: f64, ry: f64, n: usize) -> Self {
        let mut d = FourierDescriptor::zeros(center, n.max(1));
        d.harmonics[0] = Harmonic::new(0.0, rx, ry, 0.0);
        d
    }

    pub fn circle(center: Point, r: f64, n: usize) -> Self {
        FourierDescriptor::ellipse(center, r, r, n)
    }

    pub fn n_harmonics(&self) -> usize {
        self.harmonics.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.harmonics.is_empty() {
            return Err(GeomError::InvalidDescriptor("no harmonics"));
        }
        let finite = self.center.x.is_finite()
            && self.center.y.is_finite()
            && self
                .harmonics
                .iter()
                .all(|h| h.to_array().iter().all(|v| v.is_finite()));
        if !finite {
            return Err(GeomError::InvalidDescriptor("non-finite coefficient"));
        }
        Ok(())
    }

    /// Larger of the x/y amplitudes of the first harmonic.
    pub fn first_harmonic_amplitude(&self) -> f64 {
        self.harmonics
            .first()
            .map(|h| h.amplitude_x().max(h.amplitude_y()))
            .unwrap_or(0.0)
    }

    /// The 4N coefficients, level-major `[a1, b1, c1, d1, a2, ...]`.
    pub fn flat_coefficients(&self) -> Vec<f64> {
        self.harmonics.iter().flat_map(|h| h.to_array()).collect()
    }

    pub fn from_flat(center: Point, coeffs: &[f64]) -> Result<Self> {
        if !coeffs.len().is_multiple_of(4) || coeffs.is_empty() {
            return Err(GeomError::InvalidDescriptor(
                "coefficient count is not a positive multiple of 4",
            ));
        }
        let harmonics = coeffs
            .chunks_exact(4)
            .map(|c| Harmonic::new(c[0], c[1], c[2], c[3]))
            .collect();
        Ok(FourierDescriptor::new(center, harmonics))
    }

    /// Joint uniform scaling of center and coefficients about the origin.
    pub fn scaled(&self, s: f64) -> Self {
        FourierDescriptor {
            center: Point::new(self.center.x * s, self.center.y * s),
            harmonics: self
                .harmonics
                .iter()
                .map(|h| Harmonic::new(h.a * s, h.b * s, h.c * s, h.d * s))
                .collect(),
            period_samples: self.period_samples,
        }
    }

    pub fn with_center(&self, center: Point) -> Self {
        FourierDescriptor {
            center,
            ..self.clone()
        }
    }

    /// Evaluate the series at a fraction `u ∈ [0, 1)` of the period.
    pub fn point_at(&self, u: f64) -> Point {
        let mut x = self.center.x;
        let mut y = self.center.y;
        for (i, h) in self.harmonics.iter().enumerate() {
            let (s, c) = math::sin_cos(math::TAU * ((i + 1) as f64) * u);
            x += h.a * s + h.b * c;
            y += h.c * s + h.d * c;
        }
        Point::new(x, y)
    }
}

/// sin/cos of `2πk/T` for `k ∈ [0, T)`.
pub(crate) struct PhaseTable {
    sin: Vec<f64>,
    cos: Vec<f64>,
}

impl PhaseTable {
    pub(crate) fn new(period: usize) -> Self {
        let (sin, cos) = (0..period)
            .map(|k| math::sin_cos(math::TAU * (k as f64) / (period as f64)))
            .unzip();
        PhaseTable { sin, cos }
    }

    fn period(&self) -> usize {
        self.sin.len()
    }

    /// `(sin, cos)` of `2π·n·t/T`, reduced exactly in integers.
    #[inline]
    fn at(&self, n: usize, t: usize) -> (f64, f64) {
        let k = (n * t) % self.period();
        (self.sin[k], self.cos[k])
    }
}

/// Canonicalize, resample `samples` points by arc length and project onto
/// `harmonics` levels.
pub fn efd_encode(c: &Contour, harmonics: usize, samples: usize) -> Result<FourierDescriptor> {
    check_sampling(harmonics, samples)?;
    let canonical = canonicalize(c)?;
    let pts = resample(&canonical, samples)?;
    project_samples(&pts, harmonics)
}

/// Project points that are already uniform in the series parameter (e.g. the
/// output of [`efd_decode`]) onto `harmonics` levels. No canonicalization or
/// resampling takes place, so decode → project is exact up to rounding.
pub fn project_samples(pts: &[Point], harmonics: usize) -> Result<FourierDescriptor> {
    let samples = pts.len();
    check_sampling(harmonics, samples)?;
    let table = PhaseTable::new(samples);
    let inv = 1.0 / samples as f64;
    let center = Point::new(
        math::compensated_sum(pts.iter().map(|p| p.x)) * inv,
        math::compensated_sum(pts.iter().map(|p| p.y)) * inv,
    );
    let scale = 2.0 * inv;
    // Projecting the centered samples keeps the DC term out of the rounding budget.
    let proj = |n: usize, y_axis: bool, use_sin: bool| {
        let mean = if y_axis { center.y } else { center.x };
        math::compensated_sum(pts.iter().enumerate().map(|(t, p)| {
            let (s, c) = table.at(n, t);
            let v = if y_axis { p.y } else { p.x } - mean;
            v * if use_sin { s } else { c }
        })) * scale
    };
    let levels = (1..=harmonics)
        .map(|n| {
            Harmonic::new(
                proj(n, false, true),
                proj(n, false, false),
                proj(n, true, true),
                proj(n, true, false),
            )
        })
        .collect();
    Ok(FourierDescriptor {
        center,
        harmonics: levels,
        period_samples: samples,
    })
}

fn check_sampling(harmonics: usize, samples: usize) -> Result<()> {
    if harmonics == 0 {
        return Err(GeomError::InvalidParameter(
            "at least one harmonic is required",
        ));
    }
    let required = 2 * harmonics + 1;
    if samples < required {
        return Err(GeomError::InsufficientSamples {
            required,
            harmonics,
            got: samples,
        });
    }
    Ok(())
}

/// Evaluate the series at `t = 0..samples` with period `samples`.
pub fn efd_decode(d: &FourierDescriptor, samples: usize) -> Result<Contour> {
    d.validate()?;
    if samples < 3 {
        return Err(GeomError::InvalidParameter(
            "decode needs at least 3 samples",
        ));
    }
    Ok(Contour::new(decode_points(d, &PhaseTable::new(samples)), 0))
}

pub(crate) fn decode_points(d: &FourierDescriptor, table: &PhaseTable) -> Vec<Point> {
    (0..table.period())
        .map(|t| {
            let mut x = d.center.x;
            let mut y = d.center.y;
            for (i, h) in d.harmonics.iter().enumerate() {
                let (s, c) = table.at(i + 1, t);
                x += h.a * s + h.b * c;
                y += h.c * s + h.d * c;
            }
            Point::new(x, y)
        })
        .collect()
}

/// Per-level ellipse extents used to normalise regression targets.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicExtents {
    /// `(E_x, E_y)` per level, level 1 first.
    pub levels: Vec<(f64, f64)>,
    pub floor: f64,
}

impl HarmonicExtents {
    pub fn x(&self, level: usize) -> f64 {
        self.levels[level].0
    }

    pub fn y(&self, level: usize) -> f64 {
        self.levels[level].1
    }
}

/// Full extents `2·amplitude` per level, floored at
/// `1e-3 · max(1, 2·√(a1² + b1²))` so that divisions stay finite.
pub fn harmonic_extents(d: &FourierDescriptor) -> HarmonicExtents {
    let first_x = d
        .harmonics
        .first()
        .map(|h| 2.0 * h.amplitude_x())
        .unwrap_or(0.0);
    let floor = 1e-3 * first_x.max(1.0);
    let levels = d
        .harmonics
        .iter()
        .map(|h| {
            (
                (2.0 * h.amplitude_x()).max(floor),
                (2.0 * h.amplitude_y()).max(floor),
            )
        })
        .collect();
    HarmonicExtents { levels, floor }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_points(cx: f64, cy: f64, r: f64, t: usize) -> Vec<Point> {
        (0..t)
            .map(|i| {
                let (s, c) = math::sin_cos(math::TAU * i as f64 / t as f64);
                Point::new(cx + r * c, cy + r * s)
            })
            .collect()
    }

    #[test]
    fn circle_projects_to_b1_c1() {
        let d = project_samples(&circle_points(3.0, -4.0, 7.5, 360), 7).unwrap();
        assert!((d.center.x - 3.0).abs() < 1e-9 && (d.center.y + 4.0).abs() < 1e-9);
        assert!((d.harmonics[0].b - 7.5).abs() < 1e-9);
        assert!((d.harmonics[0].c - 7.5).abs() < 1e-9);
        assert!(d.harmonics[0].a.abs() < 1e-9 && d.harmonics[0].d.abs() < 1e-9);
        for h in &d.harmonics[1..] {
            assert!(h.to_array().iter().all(|v| v.abs() < 1e-9));
        }
    }

    #[test]
    fn circle_encode_through_canonical_path() {
        // The ray-start of a circle is its t = 0 point, so arc-length
        // resampling reproduces the parameterization.
        let c = Contour::new(circle_points(10.0, 20.0, 5.0, 720), 0);
        let d = efd_encode(&c, 7, 360).unwrap();
        assert!((d.harmonics[0].b - 5.0).abs() < 1e-3);
        assert!((d.harmonics[0].c - 5.0).abs() < 1e-3);
        assert!(d.harmonics[0].a.abs() < 1e-6 && d.harmonics[0].d.abs() < 1e-6);
        assert!(d.harmonics[1..]
            .iter()
            .all(|h| h.to_array().iter().all(|v| v.abs() < 1e-6)));
    }

    #[test]
    fn ellipse_encode() {
        let pts = (0..360)
            .map(|i| {
                let (s, c) = math::sin_cos(math::TAU * i as f64 / 360.0);
                Point::new(4.0 * c, 2.0 * s)
            })
            .collect::<Vec<_>>();
        let d = project_samples(&pts, 7).unwrap();
        assert!((d.harmonics[0].b - 4.0).abs() < 1e-9);
        assert!((d.harmonics[0].c - 2.0).abs() < 1e-9);
    }

    #[test]
    fn decode_unit_circle_four_points() {
        let d = FourierDescriptor::circle(Point::new(0.0, 0.0), 1.0, 3);
        let c = efd_decode(&d, 4).unwrap();
        let expect = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (p, (x, y)) in c.points.iter().zip(expect) {
            assert!((p.x - x).abs() < 1e-12 && (p.y - y).abs() < 1e-12);
        }
    }

    #[test]
    fn decode_zero_series_collapses() {
        let d = FourierDescriptor::zeros(Point::new(5.0, 5.0), 7);
        let c = efd_decode(&d, 16).unwrap();
        assert!(c.points.iter().all(|p| *p == Point::new(5.0, 5.0)));
        assert!(c.require_area().is_err());
    }

    #[test]
    fn decode_rejects_nan() {
        let mut d = FourierDescriptor::circle(Point::new(0.0, 0.0), 1.0, 2);
        d.harmonics[1].c = f64::NAN;
        assert!(matches!(
            efd_decode(&d, 16),
            Err(GeomError::InvalidDescriptor(_))
        ));
    }

    #[test]
    fn insufficient_samples() {
        let pts = circle_points(0.0, 0.0, 1.0, 14);
        assert!(matches!(
            project_samples(&pts, 7),
            Err(GeomError::InsufficientSamples { required: 15, .. })
        ));
        assert!(project_samples(&circle_points(0.0, 0.0, 1.0, 15), 7).is_ok());
    }

    #[test]
    fn extents_circle_ellipse_zero() {
        let e = harmonic_extents(&FourierDescriptor::circle(Point::default(), 3.0, 7));
        assert_eq!(e.levels[0], (6.0, 6.0));
        assert!((e.floor - 6e-3).abs() < 1e-15);
        assert!(e.levels[1..]
            .iter()
            .all(|&(x, y)| x == e.floor && y == e.floor));

        let e = harmonic_extents(&FourierDescriptor::ellipse(Point::default(), 4.0, 1.5, 2));
        assert_eq!(e.levels[0], (8.0, 3.0));

        let e = harmonic_extents(&FourierDescriptor::zeros(Point::default(), 7));
        assert!(e.levels.iter().all(|&(x, y)| x == 1e-3 && y == 1e-3));
    }

    #[test]
    fn point_at_matches_decode() {
        let mut d = FourierDescriptor::circle(Point::new(1.0, 2.0), 3.0, 3);
        d.harmonics[2] = Harmonic::new(0.1, -0.2, 0.3, 0.05);
        let c = efd_decode(&d, 32).unwrap();
        for (t, p) in c.points.iter().enumerate() {
            assert!(p.dist(d.point_at(t as f64 / 32.0)) < 1e-12);
        }
    }
}
