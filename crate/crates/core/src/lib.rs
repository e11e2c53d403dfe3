//! Multilayer spectral graph clustering with noise-aware layer weighting
//! and automatic model-order selection.

pub mod assignment;
pub mod eigen;
pub mod error;
pub mod graph;
pub mod hungarian;
pub mod kmeans;
pub mod metrics;
pub mod mimosa;
pub mod noise;
pub mod spectral;
pub mod stats;
pub mod synth;
pub mod theory;

pub use assignment::ClusterAssignment;
pub use error::{Error, Result};
pub use graph::{AggregatedGraph, LayerWeights, MultilayerGraph, SymMatrix, WeightedGraph};
pub use mimosa::{run_mimosa, MimosaConfig, MimosaResult, MimosaStatus};
pub use spectral::{multilayer_sgc, partial_eigenvalue_sum, SpectralEmbedding};
