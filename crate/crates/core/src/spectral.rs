//! Spectral embedding of the aggregated Laplacian and the multilayer SGC
//! pipeline (aggregate, embed, K-means).

use nalgebra::DMatrix;

use crate::eigen::{fix_signs, lanczos_smallest};
use crate::error::{Error, Result};
use crate::graph::{AggregatedGraph, LayerWeights, MultilayerGraph};
use crate::kmeans::kmeans;

pub use crate::assignment::ClusterAssignment;

/// Eigenvectors 2..K of `L^w` as the columns of `y`, with their eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    /// `n × (K−1)`, orthonormal columns orthogonal to `1`.
    pub y: DMatrix<f64>,
    /// `λ_2 ≤ … ≤ λ_K`
    pub eigenvalues: Vec<f64>,
    /// `λ_{K+1}`
    pub lambda_kplus1: f64,
    /// Eigenvector belonging to `λ_{K+1}`; kept so the next `K` can warm
    /// start.
    pub next_vector: Vec<f64>,
    pub max_residual: f64,
}

impl SpectralEmbedding {
    pub fn k(&self) -> usize {
        self.eigenvalues.len() + 1
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    /// Every eigenvector computed, in ascending eigenvalue order.
    pub fn ritz_vectors(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = self
            .y
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect();
        out.push(self.next_vector.clone());
        out
    }
}

/// `λ_2..λ_{K+1}` and eigenvectors of the aggregated Laplacian, with the
/// constant eigenvector deflated.
pub fn smallest_eigenpairs(g: &AggregatedGraph, k: usize) -> Result<SpectralEmbedding> {
    smallest_eigenpairs_warm(g, k, &[])
}

/// As [`smallest_eigenpairs`], seeding the solver with `warm` vectors (for
/// example the embedding at `K−1`). Falls back to a cold start if the warm
/// run fails to converge.
pub fn smallest_eigenpairs_warm(
    g: &AggregatedGraph,
    k: usize,
    warm: &[Vec<f64>],
) -> Result<SpectralEmbedding> {
    let n = g.n();
    if k < 2 || k + 1 > n {
        return Err(Error::InvalidArgument(format!(
            "K={k} outside 2..={} for a {n}-node graph",
            n.saturating_sub(1)
        )));
    }
    let components = g.connected_components().len();
    if components != 1 {
        return Err(Error::NotConnected { components });
    }
    let pairs = match lanczos_smallest(g, k, warm) {
        Err(Error::Convergence { .. }) if !warm.is_empty() => lanczos_smallest(g, k, &[])?,
        other => other?,
    };
    let mut vectors = pairs.vectors;
    fix_signs(&mut vectors);
    let next_vector = vectors.pop().unwrap();
    let y = DMatrix::from_fn(n, k - 1, |i, j| vectors[j][i]);
    Ok(SpectralEmbedding {
        y,
        eigenvalues: pairs.values[..k - 1].to_vec(),
        lambda_kplus1: pairs.values[k - 1],
        next_vector,
        max_residual: pairs.max_residual,
    })
}

/// `S_{2:K}(L^w) = Σ_{k=2}^{K} λ_k`
pub fn partial_eigenvalue_sum(emb: &SpectralEmbedding) -> f64 {
    emb.eigenvalues.iter().sum()
}

/// Embeds an already aggregated graph and clusters the rows of `Y`.
pub fn sgc_aggregated(
    g: &AggregatedGraph,
    k: usize,
    seed: u64,
    warm: &[Vec<f64>],
) -> Result<(ClusterAssignment, SpectralEmbedding)> {
    let emb = smallest_eigenpairs_warm(g, k, warm)?;
    let assignment = kmeans(&emb.y, k, seed).assignment;
    Ok((assignment, emb))
}

/// Multilayer spectral graph clustering with layer weights `w`.
pub fn multilayer_sgc(
    graph: &MultilayerGraph,
    w: &LayerWeights,
    k: usize,
    seed: u64,
) -> Result<(ClusterAssignment, SpectralEmbedding)> {
    let agg = graph.aggregate(w)?;
    sgc_aggregated(&agg, k, seed, &[])
}

/// `‖sin Θ(Y, Ỹ)‖_F` between the column spaces of two orthonormal matrices.
pub fn subspace_distance(y: &DMatrix<f64>, y_tilde: &DMatrix<f64>) -> Result<f64> {
    if y.shape() != y_tilde.shape() {
        return Err(Error::DimensionMismatch {
            expected: y.nrows() * y.ncols(),
            got: y_tilde.nrows() * y_tilde.ncols(),
        });
    }
    // ‖(I − Y Yᵀ) Ỹ‖_F = (Σ sin² θ)^{1/2}, without the cancellation of 1 − cos²
    let resid = y_tilde - y * (y.transpose() * y_tilde);
    Ok(resid.norm())
}
