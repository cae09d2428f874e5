// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::TAU;

use fcontour_core::contour::{canonicalize, centroid_area, resample};
use fcontour_core::efd::{efd_decode, efd_encode, harmonic_extents, project_samples};
use fcontour_core::mask::{extract_contours, LabelMask};
use fcontour_core::{Contour, FourierDescriptor, Harmonic, Point};
use proptest::prelude::*;

/// Naive projection straight from the series definition.
fn dft_oracle(pts: &[Point], n: usize) -> (Point, Vec<[f64; 4]>) {
    let t = pts.len() as f64;
    let cx = pts.iter().map(|p| p.x).sum::<f64>() / t;
    let cy = pts.iter().map(|p| p.y).sum::<f64>() / t;
    let levels = (1..=n)
        .map(|k| {
            let mut acc = [0.0; 4];
            for (i, p) in pts.iter().enumerate() {
                let w = TAU * (k * i) as f64 / t;
                acc[0] += (p.x - cx) * w.sin();
                acc[1] += (p.x - cx) * w.cos();
                acc[2] += (p.y - cy) * w.sin();
                acc[3] += (p.y - cy) * w.cos();
            }
            acc.map(|v| 2.0 * v / t)
        })
        .collect();
    (Point::new(cx, cy), levels)
}

/// Even-odd point-in-polygon.
fn inside(p: Point, poly: &[Point]) -> bool {
    let mut odd = false;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x) {
            odd = !odd;
        }
    }
    odd
}

fn dice_oracle(a: &Contour, b: &Contour, cells: usize) -> f64 {
    let bb = a.bbox().unwrap().union(&b.bbox().unwrap());
    let (mut na, mut nb, mut both) = (0usize, 0usize, 0usize);
    for j in 0..cells {
        for i in 0..cells {
            let p = Point::new(
                bb.min.x + (i as f64 + 0.5) / cells as f64 * bb.width(),
                bb.min.y + (j as f64 + 0.5) / cells as f64 * bb.height(),
            );
            let (ia, ib) = (inside(p, &a.points), inside(p, &b.points));
            na += ia as usize;
            nb += ib as usize;
            both += (ia && ib) as usize;
        }
    }
    2.0 * both as f64 / (na + nb) as f64
}

fn descriptor_strategy(n: usize) -> impl Strategy<Value = FourierDescriptor> {
    (
        -500.0..500.0f64,
        -500.0..500.0f64,
        prop::collection::vec(-1.0..1.0f64, 4 * n),
    )
        .prop_map(move |(cx, cy, raw)| {
            let harmonics = raw
                .chunks_exact(4)
                .enumerate()
                .map(|(i, c)| {
                    let s = 40.0 / ((i + 1) * (i + 1)) as f64;
                    Harmonic::new(c[0] * s, c[1] * s, c[2] * s, c[3] * s)
                })
                .collect();
            FourierDescriptor::new(Point::new(cx, cy), harmonics)
        })
}

fn polygon_strategy() -> impl Strategy<Value = Contour> {
    // Star-shaped polygons: sorted angles with positive radii.
    prop::collection::vec((0.0..1.0f64, 5.0..50.0f64), 5..40).prop_map(|raw| {
        let n = raw.len();
        let pts = raw
            .iter()
            .enumerate()
            .map(|(i, &(jitter, r))| {
                let th = TAU * (i as f64 + 0.8 * jitter) / n as f64;
                Point::new(100.0 + r * th.cos(), 80.0 + r * th.sin())
            })
            .collect();
        Contour::new(pts, 0)
    })
}

fn max_coeff_diff(a: &FourierDescriptor, b: &FourierDescriptor) -> f64 {
    let mut m = (a.center.x - b.center.x)
        .abs()
        .max((a.center.y - b.center.y).abs());
    for (x, y) in a.flat_coefficients().iter().zip(b.flat_coefficients()) {
        m = m.max((x - y).abs());
    }
    m
}

#[test]
fn projection_matches_naive_dft() {
    let poly = Contour::new(
        vec![
            Point::new(0.0, 0.0),
            Point::new(4.0, 0.5),
            Point::new(5.0, 3.0),
            Point::new(1.0, 4.0),
        ],
        0,
    );
    let pts = resample(&canonicalize(&poly).unwrap(), 360).unwrap();
    let d = efd_encode(&poly, 7, 360).unwrap();
    let (center, levels) = dft_oracle(&pts, 7);
    assert!((d.center.x - center.x).abs() < 1e-12 && (d.center.y - center.y).abs() < 1e-12);
    for (h, o) in d.harmonics.iter().zip(&levels) {
        for (x, y) in h.to_array().iter().zip(o) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }
}

#[test]
fn circle_and_ellipse_coefficients() {
    let circle: Vec<Point> = (0..360)
        .map(|t| {
            let w = TAU * t as f64 / 360.0;
            Point::new(7.0 + 3.0 * w.cos(), -2.0 + 3.0 * w.sin())
        })
        .collect();
    let d = efd_encode(&Contour::new(circle, 0), 7, 360).unwrap();
    assert!((d.center.x - 7.0).abs() < 1e-6 && (d.center.y + 2.0).abs() < 1e-6);
    let flat = d.flat_coefficients();
    for (i, v) in flat.iter().enumerate() {
        let expect = if i == 1 || i == 2 { 3.0 } else { 0.0 };
        assert!((v - expect).abs() < 1e-6, "coefficient {i}: {v}");
    }

    let ellipse: Vec<Point> = (0..360)
        .map(|t| {
            let w = TAU * t as f64 / 360.0;
            Point::new(5.0 * w.cos(), 2.0 * w.sin())
        })
        .collect();
    let d = project_samples(&ellipse, 7).unwrap();
    assert!((d.harmonics[0].b - 5.0).abs() < 1e-9);
    assert!((d.harmonics[0].c - 2.0).abs() < 1e-9);
}

#[test]
fn decode_four_points() {
    let d = FourierDescriptor::circle(Point::default(), 1.0, 1);
    let c = efd_decode(&d, 4).unwrap();
    let want = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
    for (p, (x, y)) in c.points.iter().zip(want) {
        assert!((p.x - x).abs() < 1e-15 && (p.y - y).abs() < 1e-15);
    }
}

#[test]
fn unit_square_codec_dice() {
    let sq = Contour::new(
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ],
        0,
    );
    let back = efd_decode(&efd_encode(&sq, 7, 360).unwrap(), 360).unwrap();
    let d = dice_oracle(&sq, &back, 600);
    assert!(d >= 0.98, "{d}");
}

#[test]
fn extents_examples() {
    let e = harmonic_extents(&FourierDescriptor::circle(Point::default(), 4.0, 3));
    assert_eq!(e.levels[0], (8.0, 8.0));
    assert_eq!(e.levels[1], (8e-3, 8e-3));
    let e = harmonic_extents(&FourierDescriptor::ellipse(Point::default(), 3.0, 1.5, 2));
    assert_eq!(e.levels[0], (6.0, 3.0));
    let e = harmonic_extents(&FourierDescriptor::zeros(Point::default(), 2));
    assert!(e.levels.iter().all(|&l| l == (1e-3, 1e-3)));
}

#[test]
fn mask_block_and_components() {
    let mut m = LabelMask::filled(10, 10, 0);
    for y in 3..7 {
        for x in 2..6 {
            m.set(x, y, 1);
        }
    }
    let cs = extract_contours(&m, 1);
    assert_eq!(cs.len(), 1);
    let bb = cs[0].bbox().unwrap();
    assert!((bb.min.x - 2.0).abs() <= 1.0 && (bb.max.x - 6.0).abs() <= 1.0);
    assert!((bb.min.y - 3.0).abs() <= 1.0 && (bb.max.y - 7.0).abs() <= 1.0);
    assert!(centroid_area(&cs[0]).1 > 0.0);

    for y in 0..3 {
        for x in 7..10 {
            m.set(x, y, 1);
        }
    }
    assert_eq!(extract_contours(&m, 1).len(), 2);
    assert!(extract_contours(&LabelMask::filled(10, 10, 0), 1).is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decode_project_roundtrip(d in descriptor_strategy(7), t in 15usize..400) {
        let c = efd_decode(&d, t).unwrap();
        let back = project_samples(&c.points, 7).unwrap();
        prop_assert!(max_coeff_diff(&d, &back) < 1e-9);
    }

    #[test]
    fn fewer_levels_than_generated_are_a_prefix(d in descriptor_strategy(3)) {
        let c = efd_decode(&d, 64).unwrap();
        let back = project_samples(&c.points, 7).unwrap();
        for (i, h) in back.harmonics.iter().enumerate() {
            let want = d.harmonics.get(i).copied().unwrap_or_default();
            for (x, y) in h.to_array().iter().zip(want.to_array()) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn circles_roundtrip_through_arc_length_encode(
        cx in -300.0..300.0f64, cy in -300.0..300.0f64, r in 0.5..200.0f64,
    ) {
        let d = FourierDescriptor::circle(Point::new(cx, cy), r, 7);
        let c = efd_decode(&d, 360).unwrap();
        let back = efd_encode(&c, 7, 360).unwrap();
        prop_assert!(max_coeff_diff(&d, &back) < 1e-9 * (1.0 + r));
    }

    #[test]
    fn residual_is_monotone_in_levels(c in polygon_strategy()) {
        let pts = resample(&canonicalize(&c).unwrap(), 120).unwrap();
        let mut last = f64::INFINITY;
        for n in 1..=12 {
            let d = efd_encode(&c, n, 120).unwrap();
            let rec = efd_decode(&d, 120).unwrap();
            let res: f64 = pts.iter().zip(&rec.points).map(|(p, q)| {
                (p.x - q.x).powi(2) + (p.y - q.y).powi(2)
            }).sum();
            prop_assert!(res <= last * (1.0 + 1e-12) + 1e-12, "N={n}: {res} > {last}");
            last = res;
        }
    }

    #[test]
    fn translation_equivariance(c in polygon_strategy(), vx in -1e3..1e3f64, vy in -1e3..1e3f64) {
        let a = efd_encode(&c, 7, 360).unwrap();
        let b = efd_encode(&c.translated(vx, vy), 7, 360).unwrap();
        prop_assert!((b.center.x - a.center.x - vx).abs() < 1e-9);
        prop_assert!((b.center.y - a.center.y - vy).abs() < 1e-9);
        for (x, y) in a.flat_coefficients().iter().zip(b.flat_coefficients()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn canonical_encode_ignores_start_and_direction(c in polygon_strategy(), k in 0usize..40) {
        let base = efd_encode(&c, 7, 360).unwrap();
        let mut rotated = c.points.clone();
        let k = k % rotated.len();
        rotated.rotate_left(k);
        let rotated = Contour::new(rotated, 0);
        for variant in [rotated.clone(), rotated.reversed()] {
            let other = efd_encode(&variant, 7, 360).unwrap();
            prop_assert!(max_coeff_diff(&base, &other) < 1e-9);
        }
        let once = canonicalize(&c).unwrap();
        prop_assert_eq!(canonicalize(&once).unwrap(), once.clone());
        prop_assert!(centroid_area(&once).1 > 0.0);
    }

    #[test]
    fn decode_doubling_keeps_even_samples(d in descriptor_strategy(7), t in 3usize..200) {
        let a = efd_decode(&d, t).unwrap();
        let b = efd_decode(&d, 2 * t).unwrap();
        for (i, p) in a.points.iter().enumerate() {
            let q = b.points[2 * i];
            prop_assert!((p.x - q.x).abs() < 1e-9 && (p.y - q.y).abs() < 1e-9);
        }
    }
}
