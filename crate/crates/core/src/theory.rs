//! Phase-transition bounds, the breakdown matrix and its eigenvalue
//! mismatch predicate, predicted partial eigenvalue sums, the two-layer
//! critical weight and the principal-angle bound.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::assignment::ClusterAssignment;
use crate::eigen::lanczos_smallest;
use crate::error::{Error, Result};
use crate::graph::{aggregate_graphs, LayerWeights, MultilayerGraph, WeightedGraph};

/// Below this size cluster spectra are computed densely.
const DENSE_LIMIT: usize = 64;

/// Bracket `[t_LB^w, t_UB^w]` on the critical noise level plus the
/// weight-independent bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseBounds {
    pub t_lb: f64,
    pub t_ub: f64,
    pub universal_lb: f64,
    pub universal_ub: f64,
    /// `S_{2:K}(L^w_k)` per cluster.
    pub cluster_sums: Vec<f64>,
    /// `S_{2:K}(L^(ℓ)_k)`, indexed `[layer][cluster]`.
    pub layer_cluster_sums: Vec<Vec<f64>>,
    pub k: usize,
    pub n: usize,
    pub n_min: usize,
    pub n_max: usize,
}

impl PhaseBounds {
    /// `c* = min_k S_{2:K}(L^w_k) / n`
    pub fn c_star(&self) -> f64 {
        min(&self.cluster_sums) / self.n as f64
    }
}

fn min(x: &[f64]) -> f64 {
    x.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max(x: &[f64]) -> f64 {
    x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Sum of the 2nd through K-th smallest Laplacian eigenvalues of `g`
/// (`g` need not be connected). Requires `g.n() >= k`.
pub fn partial_sum_of(g: &WeightedGraph, k: usize) -> Result<f64> {
    let n = g.n();
    if k < 2 {
        return Ok(0.0);
    }
    if n < k {
        return Err(Error::InvalidArgument(format!(
            "{n}-node graph has fewer than {k} eigenvalues"
        )));
    }
    if n <= DENSE_LIMIT {
        let mut ev: Vec<f64> = SymmetricEigen::new(g.laplacian_dense())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        return Ok(ev[1..k].iter().map(|x| x.max(0.0)).sum());
    }
    let e = lanczos_smallest(g, k - 1, &[])?;
    Ok(e.values.iter().map(|x| x.max(0.0)).sum())
}

fn check_sizes(assignment: &ClusterAssignment) -> Result<()> {
    let k = assignment.k();
    for (c, &size) in assignment.sizes().iter().enumerate() {
        if size < k {
            return Err(Error::ClusterTooSmall {
                cluster: c,
                size,
                required: k,
            });
        }
    }
    Ok(())
}

/// `S_{2:K}(Σ_ℓ w_ℓ L^(ℓ)_k)` for every cluster `k`.
pub fn aggregated_cluster_sums(
    graph: &MultilayerGraph,
    assignment: &ClusterAssignment,
    w: &LayerWeights,
) -> Result<Vec<f64>> {
    check_sizes(assignment)?;
    if w.len() != graph.num_layers() {
        return Err(Error::DimensionMismatch {
            expected: graph.num_layers(),
            got: w.len(),
        });
    }
    let k = assignment.k();
    let within = graph.within_cluster_graphs(assignment)?;
    (0..k)
        .map(|c| {
            let parts: Vec<&WeightedGraph> = within.iter().map(|layer| &layer[c]).collect();
            partial_sum_of(&aggregate_graphs(&parts, w), k)
        })
        .collect()
}

/// Bounds on the critical aggregated noise level for the given clusters.
pub fn critical_bounds(
    graph: &MultilayerGraph,
    assignment: &ClusterAssignment,
    w: &LayerWeights,
) -> Result<PhaseBounds> {
    let cluster_sums = aggregated_cluster_sums(graph, assignment, w)?;
    let k = assignment.k();
    let within = graph.within_cluster_graphs(assignment)?;
    let layer_cluster_sums = within
        .iter()
        .map(|layer| layer.iter().map(|g| partial_sum_of(g, k)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let (n_min, n_max) = (assignment.n_min(), assignment.n_max());
    let km1 = (k - 1) as f64;
    let s_min = min(&cluster_sums);
    let per_cluster = |f: fn(&[f64]) -> f64| -> f64 {
        let vals: Vec<f64> = (0..k)
            .map(|c| f(&layer_cluster_sums.iter().map(|l| l[c]).collect::<Vec<_>>()))
            .collect();
        min(&vals)
    };
    Ok(PhaseBounds {
        t_lb: s_min / (km1 * n_max as f64),
        t_ub: s_min / (km1 * n_min as f64),
        universal_lb: per_cluster(min) / (km1 * n_max as f64),
        universal_ub: per_cluster(max) / (km1 * n_min as f64),
        cluster_sums,
        layer_cluster_sums,
        k,
        n: assignment.n(),
        n_min,
        n_max,
    })
}

/// Breakdown matrix `W̃^w` of size `(K−1)×(K−1)`. `t[ℓ]` is the symmetric
/// `K×K` matrix of between-cluster noise levels of layer `ℓ` (diagonal
/// ignored); the last cluster plays the role of the reference cluster `K`.
pub fn breakdown_matrix(sizes: &[usize], t: &[DMatrix<f64>], w: &LayerWeights) -> Result<DMatrix<f64>> {
    let k = sizes.len();
    if k < 2 {
        return Err(Error::InvalidArgument("breakdown matrix needs K >= 2".into()));
    }
    if t.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            got: t.len(),
        });
    }
    if let Some(m) = t.iter().find(|m| m.shape() != (k, k)) {
        return Err(Error::DimensionMismatch {
            expected: k * k,
            got: m.nrows() * m.ncols(),
        });
    }
    let last = k - 1;
    let n: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
    let mut out = DMatrix::zeros(k - 1, k - 1);
    for (tl, &wl) in t.iter().zip(w.as_slice()) {
        for i in 0..k - 1 {
            for j in 0..k - 1 {
                out[(i, j)] += wl * if i == j {
                    let others: f64 = (0..k - 1)
                        .filter(|&z| z != i)
                        .map(|z| n[z] * tl[(i, z)])
                        .sum();
                    (n[i] + n[last]) * tl[(i, last)] + others
                } else {
                    n[i] * (tl[(i, last)] - tl[(i, j)])
                };
            }
        }
    }
    Ok(out)
}

/// Relative tolerance used when comparing eigenvalues.
pub const EIGEN_MATCH_TOL: f64 = 1e-6;

/// True iff no eigenvalue of `W̃^w / n` coincides (relative tolerance 1e-6)
/// with any of `λ_2..λ_K` of `L^w / n`, i.e. the failure condition holds
/// for this weight vector. `laplacian_eigs` are the unnormalized `λ_2..λ_K`.
pub fn breakdown_condition_holds(wt: &DMatrix<f64>, laplacian_eigs: &[f64], n: usize) -> bool {
    let nf = n as f64;
    let mu = (wt / nf).complex_eigenvalues();
    mu.iter().all(|m| {
        laplacian_eigs.iter().all(|&l| {
            let l = l / nf;
            let diff = ((m.re - l).powi(2) + m.im.powi(2)).sqrt();
            diff > EIGEN_MATCH_TOL * m.norm().max(l.abs())
        })
    })
}

/// Predicted `S_{2:K}(L^w) / n` as a function of the aggregated noise level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictedSum {
    Exact { value: f64 },
    Interval { lower: f64, upper: f64 },
}

impl PredictedSum {
    pub fn lower(&self) -> f64 {
        match *self {
            Self::Exact { value } => value,
            Self::Interval { lower, .. } => lower,
        }
    }

    pub fn upper(&self) -> f64 {
        match *self {
            Self::Exact { value } => value,
            Self::Interval { upper, .. } => upper,
        }
    }
}

/// `(K−1) t` below the threshold (estimated by `t_LB^w`); above it the
/// interval `c* + (K−1)(1 − n_max/n) t .. c* + (K−1)(1 − n_min/n) t`.
pub fn predicted_partial_sum(t_w: f64, bounds: &PhaseBounds) -> PredictedSum {
    predicted_partial_sum_with(t_w, bounds.t_lb, bounds.c_star(), bounds.k, bounds.n, bounds.n_min, bounds.n_max)
}

pub fn predicted_partial_sum_with(
    t_w: f64,
    threshold: f64,
    c_star: f64,
    k: usize,
    n: usize,
    n_min: usize,
    n_max: usize,
) -> PredictedSum {
    let km1 = (k - 1) as f64;
    if t_w <= threshold {
        return PredictedSum::Exact { value: km1 * t_w };
    }
    let nf = n as f64;
    PredictedSum::Interval {
        lower: c_star + km1 * (1.0 - n_max as f64 / nf) * t_w,
        upper: c_star + km1 * (1.0 - n_min as f64 / nf) * t_w,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CriticalWeight {
    /// The equation has a solution in `[0, 1]`.
    Solution { w1: f64 },
    /// `w1` drops out of the equation (symmetric layers): it either holds
    /// for every weight or for none, so there is no critical value.
    Degenerate,
    /// No solution in `[0, 1]`.
    None,
}

/// Solves `(K−1)/K · [w p1 + (1−w) p2] = w s1 + (1−w) s2` for `w`, where
/// `s_ℓ = min_k S_{2:K}(L^(ℓ)_k / n)`.
pub fn critical_weight_w1(p: [f64; 2], s: [f64; 2], k: usize) -> CriticalWeight {
    let r = (k as f64 - 1.0) / k as f64;
    // a·w = b
    let a = r * (p[0] - p[1]) - (s[0] - s[1]);
    let b = s[1] - r * p[1];
    let scale = p.iter().chain(&s).fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let eps = 1e-12 * scale;
    if a.abs() <= eps {
        return CriticalWeight::Degenerate;
    }
    let w = b / a;
    if (0.0..=1.0).contains(&w) {
        CriticalWeight::Solution { w1: w }
    } else {
        CriticalWeight::None
    }
}

/// Whether `t_min ≤ λ_j/n ≤ t_max` for every supplied eigenvalue, with an
/// additive slack on both sides.
pub fn eigenvalue_bounds_check(laplacian_eigs: &[f64], n: usize, t_min: f64, t_max: f64, slack: f64) -> bool {
    laplacian_eigs.iter().all(|&l| {
        let x = l / n as f64;
        x >= t_min - slack && x <= t_max + slack
    })
}

/// `‖L_a − L_b‖_F` for two graphs on the same node set.
pub fn laplacian_distance_fro(a: &WeightedGraph, b: &WeightedGraph) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    let mut sum = 0.0;
    for u in 0..a.n() {
        sum += (a.strength[u] - b.strength[u]).powi(2);
        let mut ra = a.weights.row(u).peekable();
        let mut rb = b.weights.row(u).peekable();
        loop {
            let d = match (ra.peek().copied(), rb.peek().copied()) {
                (None, None) => break,
                (Some((_, x)), None) => {
                    ra.next();
                    x
                }
                (None, Some((_, y))) => {
                    rb.next();
                    y
                }
                (Some((i, x)), Some((j, y))) => {
                    if i == j {
                        ra.next();
                        rb.next();
                        x - y
                    } else if i < j {
                        ra.next();
                        x
                    } else {
                        rb.next();
                        y
                    }
                }
            };
            sum += d * d;
        }
    }
    Ok(sum.sqrt())
}

/// Principal-angle bound `‖L − L̃‖_F / (n δ)` with
/// `δ = min{t, |λ_{K+1}(L/n) − t|}`. Infinite when `δ = 0`.
pub fn subspace_angle_bound(laplacian_diff_fro: f64, n: usize, t_w: f64, lambda_kplus1: f64) -> f64 {
    let nf = n as f64;
    let delta = t_w.min((lambda_kplus1 / nf - t_w).abs());
    if delta <= 0.0 {
        f64::INFINITY
    } else {
        laplacian_diff_fro / (nf * delta)
    }
}
