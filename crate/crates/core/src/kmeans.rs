//! Lloyd's K-means with k-means++ seeding and deterministic restarts.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assignment::ClusterAssignment;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iter: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iter: 300,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub assignment: ClusterAssignment,
    /// Within-cluster sum of squares of the best restart.
    pub wcss: f64,
    pub centroids: Vec<Vec<f64>>,
    /// Index of the restart that produced the result.
    pub restart: usize,
    /// WCSS after every centroid update, per restart.
    pub history: Vec<Vec<f64>>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid, ties to the lowest index.
fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, m) in centroids.iter().enumerate() {
        let d = sq_dist(p, m);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_init(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centroids = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            // guard against rounding landing on a zero-weight tail point
            while d2[chosen] == 0.0 && chosen > 0 {
                chosen -= 1;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = points[idx].clone();
        for (p, d) in points.iter().zip(d2.iter_mut()) {
            *d = d.min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn update_centroids(points: &[Vec<f64>], labels: &[usize], k: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(p) {
            *s += x;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        for x in s.iter_mut() {
            *x /= c as f64;
        }
    }
    sums
}

/// Moves the point farthest from its centroid into each empty cluster. Only
/// points from clusters with more than one member are eligible.
fn repair_empty(
    points: &[Vec<f64>],
    labels: &mut [usize],
    centroids: &mut [Vec<f64>],
    k: usize,
) {
    let mut counts = vec![0usize; k];
    for &l in labels.iter() {
        counts[l] += 1;
    }
    for c in 0..k {
        if counts[c] > 0 {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in points.iter().enumerate() {
            if counts[labels[i]] <= 1 {
                continue;
            }
            let d = sq_dist(p, &centroids[labels[i]]);
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
        if let Some((i, _)) = best {
            counts[labels[i]] -= 1;
            labels[i] = c;
            counts[c] = 1;
            centroids[c] = points[i].clone();
        }
    }
}

fn wcss(points: &[Vec<f64>], labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .zip(labels)
        .map(|(p, &l)| sq_dist(p, &centroids[l]))
        .sum()
}

struct Run {
    labels: Vec<usize>,
    centroids: Vec<Vec<f64>>,
    wcss: f64,
    history: Vec<f64>,
}

fn lloyd(points: &[Vec<f64>], k: usize, max_iter: usize, rng: &mut ChaCha8Rng) -> Run {
    let dim = points[0].len();
    let mut centroids = plus_plus_init(points, k, rng);
    let mut labels: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
    let mut history = Vec::new();
    for iter in 0..max_iter {
        if iter > 0 {
            let next: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
            if next == labels {
                break;
            }
            labels = next;
        }
        repair_empty(points, &mut labels, &mut centroids, k);
        centroids = update_centroids(points, &labels, k, dim);
        history.push(wcss(points, &labels, &centroids));
    }
    Run {
        wcss: *history.last().unwrap(),
        labels,
        centroids,
        history,
    }
}

/// Clusters the rows of `rows` into `k` groups, returning the best of
/// `config.restarts` runs (lowest WCSS, earliest restart on ties).
/// Deterministic in `seed`.
pub fn kmeans_with(rows: &DMatrix<f64>, k: usize, seed: u64, config: KMeansConfig) -> KMeansResult {
    let n = rows.nrows();
    assert!(k >= 1 && k <= n, "k-means needs 1 <= k <= n (k={k}, n={n})");
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| rows.row(i).iter().copied().collect())
        .collect();
    let points = if rows.ncols() == 0 {
        vec![vec![0.0]; n]
    } else {
        points
    };
    let mut best: Option<(usize, Run)> = None;
    let mut history = Vec::with_capacity(config.restarts);
    for r in 0..config.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let run = lloyd(&points, k, config.max_iter.max(1), &mut rng);
        history.push(run.history.clone());
        if best.as_ref().is_none_or(|(_, b)| run.wcss < b.wcss) {
            best = Some((r, run));
        }
    }
    let (restart, run) = best.unwrap();
    // labels are already 0..k and every cluster is non-empty, so compaction
    // keeps them as they are
    KMeansResult {
        assignment: ClusterAssignment::from_labels(run.labels),
        wcss: run.wcss,
        centroids: run.centroids,
        restart,
        history,
    }
}

pub fn kmeans(rows: &DMatrix<f64>, k: usize, seed: u64) -> KMeansResult {
    kmeans_with(rows, k, seed, KMeansConfig::default())
}
