//! Synthetic multilayer graphs with planted clusters, and cluster
//! detectability against a ground truth.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::ClusterAssignment;
use crate::error::{Error, Result};
use crate::graph::MultilayerGraph;
use crate::hungarian::max_weight_matching;

/// Two-layer model: same-cluster pairs pick one of four joint outcomes
/// (edge in both layers, layer 1 only, layer 2 only, neither); cross-cluster
/// pairs get an edge in layer `ℓ` independently with probability `p[ℓ]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoLayerParams {
    pub cluster_sizes: Vec<usize>,
    /// `(q11, q10, q01, q00)`
    pub q: [f64; 4],
    pub p: [f64; 2],
    pub seed: u64,
}

impl TwoLayerParams {
    pub fn validate(&self) -> Result<()> {
        validate_sizes(&self.cluster_sizes)?;
        if self.q.iter().any(|q| !(0.0..=1.0).contains(q)) {
            return Err(Error::InvalidArgument(format!("q values must lie in [0, 1]: {:?}", self.q)));
        }
        let sum: f64 = self.q.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("q values sum to {sum}, not 1")));
        }
        if self.p.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidArgument(format!("p values must lie in [0, 1]: {:?}", self.p)));
        }
        Ok(())
    }
}

fn validate_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidArgument(format!("cluster sizes must be positive: {sizes:?}")));
    }
    Ok(())
}

/// Node identifiers `n0000, n0001, …`, zero padded so lexicographic order is
/// generation order.
pub fn node_ids(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len().max(4);
    (0..n).map(|i| format!("n{i:0width$}")).collect()
}

fn truth_labels(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
        .collect()
}

pub fn generate_two_layer(params: &TwoLayerParams) -> Result<(MultilayerGraph, ClusterAssignment)> {
    params.validate()?;
    let labels = truth_labels(&params.cluster_sizes);
    let n = labels.len();
    let [q11, q10, q01, _] = params.q;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if labels[u] == labels[v] {
                let x: f64 = rng.random();
                let (a, b) = if x < q11 {
                    (true, true)
                } else if x < q11 + q10 {
                    (true, false)
                } else if x < q11 + q10 + q01 {
                    (false, true)
                } else {
                    (false, false)
                };
                if a {
                    edges.push((0, u, v, 1.0));
                }
                if b {
                    edges.push((1, u, v, 1.0));
                }
            } else {
                // both draws always happen so graphs for different p share
                // their random numbers
                let x0: f64 = rng.random();
                let x1: f64 = rng.random();
                if x0 < params.p[0] {
                    edges.push((0, u, v, 1.0));
                }
                if x1 < params.p[1] {
                    edges.push((1, u, v, 1.0));
                }
            }
        }
    }
    let g = MultilayerGraph::from_edges(node_ids(n), 2, &edges)?;
    Ok((g, ClusterAssignment::from_labels(labels)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightDistribution {
    /// Every edge weighs exactly the mean.
    Constant,
    /// Uniform on `(0, 2·mean]`.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WithinSpec {
    /// Unit-weight Erdős–Rényi edges, probability `[layer][cluster]`.
    ErdosRenyi(Vec<Vec<f64>>),
    /// Explicit weighted edges `[layer][cluster]` in cluster-local indices.
    Explicit(Vec<Vec<Vec<(usize, usize, f64)>>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    /// Per layer `(p, mean weight)` shared by every cluster pair.
    Identical(Vec<(f64, f64)>),
    /// Per layer symmetric `K×K` matrices of probabilities and mean weights.
    PerPair { p: Vec<DMatrix<f64>>, w_bar: Vec<DMatrix<f64>> },
}

/// Random interconnection model: arbitrary within-cluster structure,
/// independent Bernoulli between-cluster edges per block and layer.
#[derive(Debug, Clone, PartialEq)]
pub struct RimParams {
    pub cluster_sizes: Vec<usize>,
    pub layers: usize,
    pub within: WithinSpec,
    pub noise: NoiseSpec,
    pub weights: WeightDistribution,
    pub seed: u64,
}

impl RimParams {
    fn noise_at(&self, layer: usize, i: usize, j: usize) -> (f64, f64) {
        match &self.noise {
            NoiseSpec::Identical(v) => v[layer],
            NoiseSpec::PerPair { p, w_bar } => (p[layer][(i, j)], w_bar[layer][(i, j)]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_sizes(&self.cluster_sizes)?;
        let k = self.cluster_sizes.len();
        let bad = |m: String| Err(Error::InvalidArgument(m));
        match &self.within {
            WithinSpec::ErdosRenyi(q) => {
                if q.len() != self.layers || q.iter().any(|l| l.len() != k) {
                    return bad("within-cluster probabilities must be [layer][cluster]".into());
                }
                if q.iter().flatten().any(|x| !(0.0..=1.0).contains(x)) {
                    return bad("within-cluster probabilities must lie in [0, 1]".into());
                }
            }
            WithinSpec::Explicit(e) => {
                if e.len() != self.layers || e.iter().any(|l| l.len() != k) {
                    return bad("within-cluster graphs must be [layer][cluster]".into());
                }
                for layer in e {
                    for (c, edges) in layer.iter().enumerate() {
                        for &(u, v, w) in edges {
                            if u == v || u >= self.cluster_sizes[c] || v >= self.cluster_sizes[c] || !(w > 0.0 && w.is_finite()) {
                                return bad(format!("invalid within-cluster edge ({u}, {v}, {w})"));
                            }
                        }
                    }
                }
            }
        }
        match &self.noise {
            NoiseSpec::Identical(v) => {
                if v.len() != self.layers {
                    return bad("identical noise needs one (p, mean) per layer".into());
                }
            }
            NoiseSpec::PerPair { p, w_bar } => {
                if p.len() != self.layers
                    || w_bar.len() != self.layers
                    || p.iter().chain(w_bar).any(|m| m.shape() != (k, k))
                {
                    return bad("per-pair noise needs K×K matrices per layer".into());
                }
            }
        }
        for l in 0..self.layers {
            for i in 0..k {
                for j in i + 1..k {
                    let (p, w) = self.noise_at(l, i, j);
                    if !(0.0..=1.0).contains(&p) {
                        return bad(format!("noise probability {p} outside [0, 1]"));
                    }
                    if p > 0.0 && !(w > 0.0 && w.is_finite()) {
                        return bad(format!("mean weight {w} must be positive where p > 0"));
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn generate_rim(params: &RimParams) -> Result<(MultilayerGraph, ClusterAssignment)> {
    params.validate()?;
    let labels = truth_labels(&params.cluster_sizes);
    let n = labels.len();
    let starts: Vec<usize> = params
        .cluster_sizes
        .iter()
        .scan(0, |acc, &s| {
            let start = *acc;
            *acc += s;
            Some(start)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut edges = Vec::new();
    if let WithinSpec::Explicit(e) = &params.within {
        for (l, layer) in e.iter().enumerate() {
            for (c, list) in layer.iter().enumerate() {
                for &(u, v, w) in list {
                    edges.push((l, starts[c] + u, starts[c] + v, w));
                }
            }
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = (labels[u], labels[v]);
            for l in 0..params.layers {
                if a == b {
                    if let WithinSpec::ErdosRenyi(q) = &params.within {
                        if rng.random::<f64>() < q[l][a] {
                            edges.push((l, u, v, 1.0));
                        }
                    }
                } else {
                    let (p, w_bar) = params.noise_at(l, a.min(b), a.max(b));
                    if rng.random::<f64>() < p {
                        let w = match params.weights {
                            WeightDistribution::Constant => w_bar,
                            WeightDistribution::Uniform => (1.0 - rng.random::<f64>()) * 2.0 * w_bar,
                        };
                        edges.push((l, u, v, w));
                    }
                }
            }
        }
    }
    let g = MultilayerGraph::from_edges(node_ids(n), params.layers, &edges)?;
    Ok((g, ClusterAssignment::from_labels(labels)))
}

/// Fraction of nodes placed in their matched ground-truth cluster under the
/// best one-to-one matching of found clusters to true clusters.
pub fn detectability(found: &ClusterAssignment, truth: &ClusterAssignment) -> Result<f64> {
    if found.n() != truth.n() {
        return Err(Error::DimensionMismatch {
            expected: truth.n(),
            got: found.n(),
        });
    }
    if found.n() == 0 {
        return Ok(1.0);
    }
    let mut overlap = vec![vec![0.0; truth.k()]; found.k()];
    for (&a, &b) in found.labels().iter().zip(truth.labels()) {
        overlap[a][b] += 1.0;
    }
    Ok(max_weight_matching(&overlap) / found.n() as f64)
}

/// Uniformly random labels in `0..k` (clusters may end up fewer than `k`).
pub fn random_assignment(n: usize, k: usize, seed: u64) -> ClusterAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ClusterAssignment::from_labels((0..n).map(|_| rng.random_range(0..k)).collect())
}
