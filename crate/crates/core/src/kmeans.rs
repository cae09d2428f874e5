// SPDX-License-Identifier: Apache-2.0

//! Seeded k-means (k-means++ initialisation, Lloyd iterations).

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::math;

pub const MAX_ITERATIONS: usize = 100;
pub const SHIFT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub centroids: Vec<Vec<f64>>,
    /// Cluster index per input row.
    pub labels: Vec<usize>,
    pub populations: Vec<usize>,
    /// Within-cluster sum of squares after each assignment step.
    pub sse_history: Vec<f64>,
    pub iterations: usize,
}

/// Cluster equal-length rows into `k` groups. Deterministic for a given seed.
pub fn kmeans(rows: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeans> {
    if k == 0 {
        return Err(GeomError::InvalidParameter("k must be at least 1"));
    }
    let dim = rows.first().map(Vec::len).unwrap_or(0);
    if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
        return Err(GeomError::ShapeMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    let distinct = count_distinct(rows);
    if distinct < k {
        return Err(GeomError::DegenerateClustering { k, distinct });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_init(rows, k, &mut rng);
    let mut labels = vec![0usize; rows.len()];
    let mut sse_history = Vec::new();
    let mut iterations = 0;

    loop {
        let sse = assign_rows(rows, &centroids, &mut labels);
        sse_history.push(sse);
        if iterations == MAX_ITERATIONS {
            break;
        }
        iterations += 1;

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (row, &l) in rows.iter().zip(&labels) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(row) {
                *s += v;
            }
        }
        let mut max_shift = 0.0f64;
        for c in 0..k {
            // An emptied cluster keeps its previous centroid.
            if counts[c] == 0 {
                continue;
            }
            let inv = 1.0 / counts[c] as f64;
            let new: Vec<f64> = sums[c].iter().map(|s| s * inv).collect();
            max_shift = max_shift.max(math::sqrt(sq_dist(&new, &centroids[c])));
            centroids[c] = new;
        }
        if max_shift < SHIFT_TOLERANCE {
            sse_history.push(assign_rows(rows, &centroids, &mut labels));
            break;
        }
    }

    let mut populations = vec![0usize; k];
    for &l in &labels {
        populations[l] += 1;
    }
    Ok(KMeans {
        centroids,
        labels,
        populations,
        sse_history,
        iterations,
    })
}

fn count_distinct(rows: &[Vec<f64>]) -> usize {
    let mut sorted: Vec<&Vec<f64>> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    sorted.dedup_by(|a, b| a == b);
    sorted.len()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus_init(rows: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = Vec::with_capacity(k);
    centroids.push(rows[rng.random_range(0..rows.len())].clone());
    let mut d2: Vec<f64> = rows.iter().map(|r| sq_dist(r, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        // Fall back to the last row with positive weight against rounding.
        let mut pick = d2.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        for (i, &w) in d2.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            acc += w;
            if acc > target {
                pick = i;
                break;
            }
        }
        let chosen = rows[pick].clone();
        for (d, r) in d2.iter_mut().zip(rows) {
            *d = d.min(sq_dist(r, &chosen));
        }
        centroids.push(chosen);
    }
    centroids
}

/// Nearest-centroid labels (ties to the lower index); returns the SSE.
fn assign_rows(rows: &[Vec<f64>], centroids: &[Vec<f64>], labels: &mut [usize]) -> f64 {
    let mut sse = 0.0;
    for (row, label) in rows.iter().zip(labels.iter_mut()) {
        let (best, d) = centroids
            .iter()
            .enumerate()
            .map(|(i, c)| (i, sq_dist(row, c)))
            .fold(
                (0, f64::INFINITY),
                |acc, cur| if cur.1 < acc.1 { cur } else { acc },
            );
        *label = best;
        sse += d;
    }
    sse
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_obvious_groups() {
        let mut rows = Vec::new();
        for i in 0..10 {
            rows.push(vec![0.0 + i as f64 * 0.01, 0.0]);
            rows.push(vec![100.0 + i as f64 * 0.01, 5.0]);
        }
        let km = kmeans(&rows, 2, 3).unwrap();
        assert_eq!(km.populations, vec![10, 10]);
        let mut xs: Vec<f64> = km.centroids.iter().map(|c| c[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert!((xs[0] - 0.045).abs() < 1e-9 && (xs[1] - 100.045).abs() < 1e-9);
    }

    #[test]
    fn sse_never_increases() {
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|i| {
                let t = i as f64;
                vec![math::sin_cos(t * 0.7).0 * 10.0 + t * 0.1, (t * 1.3) % 7.0]
            })
            .collect();
        let km = kmeans(&rows, 4, 11).unwrap();
        for w in km.sse_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{:?}", km.sse_history);
        }
    }

    #[test]
    fn too_few_distinct_rows() {
        let rows = vec![vec![1.0, 2.0]; 100];
        assert_eq!(
            kmeans(&rows, 9, 0).unwrap_err(),
            GeomError::DegenerateClustering { k: 9, distinct: 1 }
        );
    }
}
