//! External (against ground truth) and internal (graph-based) clustering
//! quality metrics.

use serde::{Deserialize, Serialize};

use crate::assignment::ClusterAssignment;
use crate::error::{Error, Result};
use crate::graph::{MultilayerGraph, SymMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nmi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ri: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub f_measure: Option<f64>,
    pub conductance: f64,
    pub nc: f64,
}

/// Every metric that applies; external ones only when `truth` is given.
pub fn evaluate(
    graph: &MultilayerGraph,
    found: &ClusterAssignment,
    truth: Option<&ClusterAssignment>,
) -> Result<MetricReport> {
    let (nmi, ri, f) = match truth {
        Some(t) => (Some(nmi(found, t)?), Some(rand_index(found, t)?), Some(f_measure(found, t)?)),
        None => (None, None, None),
    };
    Ok(MetricReport {
        nmi,
        ri,
        f_measure: f,
        conductance: conductance(found, graph)?,
        nc: normalized_cut(found, graph)?,
    })
}

fn contingency(a: &ClusterAssignment, b: &ClusterAssignment) -> Result<Vec<Vec<usize>>> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    let mut m = vec![vec![0usize; b.k()]; a.k()];
    for (&x, &y) in a.labels().iter().zip(b.labels()) {
        m[x][y] += 1;
    }
    Ok(m)
}

fn entropy(sizes: &[usize], n: f64) -> f64 {
    sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// `2 I(found; truth) / (H(found) + H(truth))`, natural logarithms; 1 when
/// both entropies vanish.
pub fn nmi(found: &ClusterAssignment, truth: &ClusterAssignment) -> Result<f64> {
    let m = contingency(found, truth)?;
    let n = found.n() as f64;
    let (ha, hb) = (entropy(found.sizes(), n), entropy(truth.sizes(), n));
    if ha + hb == 0.0 {
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0 {
                let c = c as f64;
                mi += c / n * (c * n / (found.sizes()[i] as f64 * truth.sizes()[j] as f64)).ln();
            }
        }
    }
    Ok((2.0 * mi / (ha + hb)).clamp(0.0, 1.0))
}

fn choose2(x: usize) -> u128 {
    let x = x as u128;
    x * x.saturating_sub(1) / 2
}

/// Fraction of unordered node pairs on which the two partitions agree.
pub fn rand_index(found: &ClusterAssignment, truth: &ClusterAssignment) -> Result<f64> {
    let m = contingency(found, truth)?;
    let total = choose2(found.n());
    if total == 0 {
        return Ok(1.0);
    }
    let tp: u128 = m.iter().flatten().map(|&c| choose2(c)).sum();
    let same_found: u128 = found.sizes().iter().map(|&s| choose2(s)).sum();
    let same_truth: u128 = truth.sizes().iter().map(|&s| choose2(s)).sum();
    let fp = same_found - tp;
    let fn_ = same_truth - tp;
    let tn = total - tp - fp - fn_;
    Ok((tp + tn) as f64 / total as f64)
}

/// Mean over found clusters of the F1 score against the truth cluster with
/// the largest overlap (lowest index on ties).
pub fn f_measure(found: &ClusterAssignment, truth: &ClusterAssignment) -> Result<f64> {
    let m = contingency(found, truth)?;
    if found.k() == 0 {
        return Ok(1.0);
    }
    let mut sum = 0.0;
    for (k, row) in m.iter().enumerate() {
        let mut best = 0;
        for (j, &c) in row.iter().enumerate() {
            if c > row[best] {
                best = j;
            }
        }
        let overlap = row[best] as f64;
        let prec = overlap / found.sizes()[k] as f64;
        let rec = overlap / truth.sizes()[best] as f64;
        if prec + rec > 0.0 {
            sum += 2.0 * prec * rec / (prec + rec);
        }
    }
    Ok(sum / found.k() as f64)
}

/// Per cluster `(W_in, W_out)`: within-cluster edge weight (each edge once)
/// and weight of edges leaving the cluster.
fn cut_weights(layer: &SymMatrix, a: &ClusterAssignment) -> Vec<(f64, f64)> {
    let labels = a.labels();
    let mut out = vec![(0.0, 0.0); a.k()];
    for (u, v, w) in layer.upper_entries() {
        let (x, y) = (labels[u], labels[v]);
        if x == y {
            out[x].0 += w;
        } else {
            out[x].1 += w;
            out[y].1 += w;
        }
    }
    out
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

fn check_cover(found: &ClusterAssignment, graph: &MultilayerGraph) -> Result<()> {
    if found.n() != graph.n() {
        return Err(Error::DimensionMismatch {
            expected: graph.n(),
            got: found.n(),
        });
    }
    Ok(())
}

/// `(1/K) Σ_k W_out / (2 W_in + W_out)` per layer, summed over layers.
pub fn conductance(found: &ClusterAssignment, graph: &MultilayerGraph) -> Result<f64> {
    check_cover(found, graph)?;
    let k = found.k().max(1) as f64;
    Ok(graph
        .layers()
        .iter()
        .map(|layer| {
            cut_weights(layer, found)
                .iter()
                .map(|&(win, wout)| ratio(wout, 2.0 * win + wout))
                .sum::<f64>()
                / k
        })
        .sum())
}

/// Normalized cut: the conductance term plus
/// `W_out / (2 (W_all − W_in) + W_out)` with `W_all` the total weight of the
/// layer, averaged over clusters and summed over layers.
pub fn normalized_cut(found: &ClusterAssignment, graph: &MultilayerGraph) -> Result<f64> {
    check_cover(found, graph)?;
    let k = found.k().max(1) as f64;
    Ok(graph
        .layers()
        .iter()
        .map(|layer| {
            let all = layer.total_weight();
            cut_weights(layer, found)
                .iter()
                .map(|&(win, wout)| {
                    ratio(wout, 2.0 * win + wout) + ratio(wout, 2.0 * (all - win) + wout)
                })
                .sum::<f64>()
                / k
        })
        .sum())
}
