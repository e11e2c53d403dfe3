//! Between-cluster noise estimators and the reliability tests built on them:
//! the row-sum homogeneity V-test, the identical-noise GLRT and the
//! Anscombe-transformed non-identical-noise test.

use serde::{Deserialize, Serialize};

use crate::assignment::ClusterAssignment;
use crate::error::{Error, Result};
use crate::graph::{LayerWeights, MultilayerGraph};
use crate::stats::{chi_square_quantile, normal_cdf, normal_sf};

/// Estimates for one cluster pair `i < j` in one layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEstimate {
    pub i: usize,
    pub j: usize,
    /// `m̂_ij`, between-cluster edge count.
    pub edges: usize,
    /// `n_i · n_j`
    pub slots: usize,
    pub weight_sum: f64,
    pub p_hat: f64,
    /// Mean between-cluster edge weight, 0 for an empty block.
    pub w_bar: f64,
    pub t_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerNoise {
    /// Pairs in lexicographic `(i, j)` order.
    pub pairs: Vec<PairEstimate>,
    pub p_hat: f64,
    pub w_bar: f64,
    pub t_hat: f64,
    pub t_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseEstimates {
    pub sizes: Vec<usize>,
    pub layers: Vec<LayerNoise>,
}

impl NoiseEstimates {
    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = (i.min(j), i.max(j));
        let k = self.k();
        // pairs before row i, then offset within the row
        i * k - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn pair(&self, layer: usize, i: usize, j: usize) -> &PairEstimate {
        &self.layers[layer].pairs[self.pair_index(i, j)]
    }

    /// Per-layer pooled `t̂^(ℓ)`.
    pub fn t_hat(&self) -> Vec<f64> {
        self.layers.iter().map(|l| l.t_hat).collect()
    }

    pub fn t_max(&self) -> Vec<f64> {
        self.layers.iter().map(|l| l.t_max).collect()
    }

    /// `t̂^w = Σ_ℓ w_ℓ t̂^(ℓ)`
    pub fn t_w(&self, w: &LayerWeights) -> f64 {
        w.dot(&self.t_hat())
    }

    /// `t̂_max^w = Σ_ℓ w_ℓ t̂_max^(ℓ)`
    pub fn t_max_w(&self, w: &LayerWeights) -> f64 {
        w.dot(&self.t_max())
    }
}

fn pair_count(k: usize) -> usize {
    k * (k - 1) / 2
}

/// Per-layer, per-cluster-pair estimates of the between-cluster noise.
pub fn estimate_noise(graph: &MultilayerGraph, assignment: &ClusterAssignment) -> Result<NoiseEstimates> {
    let k = assignment.k();
    if k < 2 {
        return Err(Error::InvalidArgument("noise estimation needs K >= 2".into()));
    }
    if assignment.n() != graph.n() {
        return Err(Error::DimensionMismatch {
            expected: graph.n(),
            got: assignment.n(),
        });
    }
    let sizes = assignment.sizes().to_vec();
    let labels = assignment.labels();
    let idx = |i: usize, j: usize| i * k - i * (i + 1) / 2 + (j - i - 1);
    let layers = graph
        .layers()
        .iter()
        .map(|layer| {
            let mut edges = vec![0usize; pair_count(k)];
            let mut wsum = vec![0.0; pair_count(k)];
            for (u, v, w) in layer.upper_entries() {
                let (a, b) = (labels[u], labels[v]);
                if a != b {
                    let p = idx(a.min(b), a.max(b));
                    edges[p] += 1;
                    wsum[p] += w;
                }
            }
            let mut pairs = Vec::with_capacity(pair_count(k));
            for i in 0..k {
                for j in i + 1..k {
                    let p = idx(i, j);
                    let slots = sizes[i] * sizes[j];
                    let p_hat = edges[p] as f64 / slots as f64;
                    let w_bar = if edges[p] > 0 { wsum[p] / edges[p] as f64 } else { 0.0 };
                    pairs.push(PairEstimate {
                        i,
                        j,
                        edges: edges[p],
                        slots,
                        weight_sum: wsum[p],
                        p_hat,
                        w_bar,
                        t_hat: p_hat * w_bar,
                    });
                }
            }
            let m: usize = edges.iter().sum();
            let slots: usize = pairs.iter().map(|p| p.slots).sum();
            let total_w: f64 = wsum.iter().sum();
            let p_hat = m as f64 / slots as f64;
            let w_bar = if m > 0 { total_w / m as f64 } else { 0.0 };
            let t_max = pairs.iter().map(|p| p.t_hat).fold(0.0, f64::max);
            LayerNoise {
                pairs,
                p_hat,
                w_bar,
                t_hat: p_hat * w_bar,
                t_max,
            }
        })
        .collect();
    Ok(NoiseEstimates { sizes, layers })
}

/// Two-sided p-value of the V-test that the row sums `R_u ~ Binomial(n_j, p)`
/// of a between-cluster block share a common `p`.
///
/// `V = Σ_u (R_u − n_j p̂)² / (n_j p̂ q̂)` has null mean `n_i − 1` and
/// variance `2 (n_i − 1)(1 − 1/n_j)`. It is matched to a scaled chi-square
/// `c·χ²_ν` with the same two moments and referred to the normal through the
/// Wilson–Hilferty cube-root transform. Degenerate blocks give 1.
pub fn vtest_homogeneity(row_sums: &[usize], n_j: usize) -> f64 {
    let n_i = row_sums.len();
    if n_i < 2 || n_j < 2 {
        return 1.0;
    }
    let total: usize = row_sums.iter().sum();
    let p = total as f64 / (n_i * n_j) as f64;
    if p <= 0.0 || p >= 1.0 {
        return 1.0;
    }
    let nj = n_j as f64;
    let mean = nj * p;
    let denom = nj * p * (1.0 - p);
    let v: f64 = row_sums
        .iter()
        .map(|&r| (r as f64 - mean).powi(2) / denom)
        .sum();
    let c = 1.0 - 1.0 / nj;
    let nu = (n_i as f64 - 1.0) / c;
    let h = 2.0 / (9.0 * nu);
    let z = ((v / (c * nu)).cbrt() - (1.0 - h)) / h.sqrt();
    (2.0 * normal_sf(z.abs())).min(1.0)
}

/// Row sums of the between-cluster block `Ĉ_ij` in one layer: for each node
/// of cluster `i` (increasing index), its edge count into cluster `j`.
pub fn block_row_sums(
    graph: &MultilayerGraph,
    assignment: &ClusterAssignment,
    layer: usize,
    i: usize,
    j: usize,
) -> Vec<usize> {
    let labels = assignment.labels();
    let l = graph.layer(layer);
    (0..graph.n())
        .filter(|&u| labels[u] == i)
        .map(|u| l.row(u).filter(|&(v, _)| labels[v] == j).count())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VTestOutcome {
    pub layer: usize,
    pub i: usize,
    pub j: usize,
    pub p_value: f64,
}

/// V-test p-values for every layer and ordered cluster pair `i ≠ j`.
pub fn vtest_all(graph: &MultilayerGraph, assignment: &ClusterAssignment) -> Vec<VTestOutcome> {
    let k = assignment.k();
    let labels = assignment.labels();
    let sizes = assignment.sizes();
    let mut out = Vec::with_capacity(graph.num_layers() * k * k.saturating_sub(1));
    for (layer, mat) in graph.layers().iter().enumerate() {
        // counts[u * k + c]: edges from u into cluster c
        let mut counts = vec![0usize; graph.n() * k];
        for u in 0..graph.n() {
            for (v, _) in mat.row(u) {
                counts[u * k + labels[v]] += 1;
            }
        }
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); k * k];
        for u in 0..graph.n() {
            let i = labels[u];
            for j in 0..k {
                if j != i {
                    rows[i * k + j].push(counts[u * k + j]);
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    out.push(VTestOutcome {
                        layer,
                        i,
                        j,
                        p_value: vtest_homogeneity(&rows[i * k + j], sizes[j]),
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlrtOutcome {
    pub statistic: f64,
    /// Acceptance threshold; 0 degrees of freedom (K = 2) has none.
    pub threshold: Option<f64>,
    pub accept: bool,
}

/// `x · ln(x / y)` with the `0 · ln 0 = 0` convention.
fn xlogy_ratio(count: f64, num: f64, den: f64) -> f64 {
    if count == 0.0 {
        0.0
    } else {
        count * (num / den).ln()
    }
}

/// GLRT of identical between-cluster noise in `layer`: `−2 ln Λ` compared
/// with the chi-square quantile on `K(K−1)/2 − 1` degrees of freedom.
pub fn glrt_identical_noise(est: &NoiseEstimates, layer: usize, alpha: f64) -> Result<GlrtOutcome> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside (0, 1)")));
    }
    let ln = &est.layers[layer];
    let p0 = ln.p_hat;
    let mut g = 0.0;
    for pair in &ln.pairs {
        let m = pair.edges as f64;
        let rest = (pair.slots - pair.edges) as f64;
        g += xlogy_ratio(m, pair.p_hat, p0) + xlogy_ratio(rest, 1.0 - pair.p_hat, 1.0 - p0);
    }
    let g = (2.0 * g).max(0.0);
    let dof = pair_count(est.k()) - 1;
    if dof == 0 {
        return Ok(GlrtOutcome {
            statistic: g,
            threshold: None,
            accept: true,
        });
    }
    let threshold = chi_square_quantile(1.0 - alpha, dof as f64)?;
    Ok(GlrtOutcome {
        statistic: g,
        threshold: Some(threshold),
        accept: g <= threshold,
    })
}

/// Variance-stabilized proportion `asin √((x + c′/N) / (1 + 2c′/N))`,
/// `c′ = 3/8`, `N = n_i n_j`; the radicand is clipped to `[0, 1]`.
pub fn anscombe(x: f64, slots: usize) -> f64 {
    let inv = 1.0 / slots as f64;
    let r = (x + 0.375 * inv) / (1.0 + 0.75 * inv);
    r.clamp(0.0, 1.0).sqrt().asin()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnscombeOutcome {
    pub product: f64,
    pub accept: bool,
}

/// Non-identical-noise reliability test for `layer`: accepts iff
/// `Π_{i<j} F_ij ≥ 1 − α′`.
pub fn anscombe_nonidentical_test(
    est: &NoiseEstimates,
    layer: usize,
    t_lb_hat: f64,
    alpha_prime: f64,
) -> Result<AnscombeOutcome> {
    if !(alpha_prime > 0.0 && alpha_prime < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha' {alpha_prime} outside (0, 1)"
        )));
    }
    let mut product = 1.0;
    for pair in &est.layers[layer].pairs {
        let f = if pair.p_hat > 0.0 && pair.p_hat < 1.0 {
            let scale = (4.0 * pair.slots as f64 + 2.0).sqrt();
            let a = anscombe(t_lb_hat / pair.w_bar, pair.slots);
            normal_cdf(scale * (a - anscombe(pair.p_hat, pair.slots)))
        } else if pair.t_hat < t_lb_hat {
            1.0
        } else {
            0.0
        };
        product *= f;
    }
    Ok(AnscombeOutcome {
        product,
        accept: product >= 1.0 - alpha_prime,
    })
}
