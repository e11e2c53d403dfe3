//! Generator parameters read from `key = value` files.

use multisgc::synth::{
    generate_rim, generate_two_layer, NoiseSpec, RimParams, TwoLayerParams, WeightDistribution,
    WithinSpec,
};
use multisgc::{ClusterAssignment, MultilayerGraph};

use crate::kv::KeyValues;
use crate::CliError;

pub const MODEL_KEYS: [&str; 9] = [
    "model", "sizes", "q", "p", "within", "noise_w", "weights", "seed", "w",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    /// Correlated two-layer model.
    TwoLayer { sizes: Vec<usize>, q: [f64; 4], p: [f64; 2] },
    /// Random interconnection model with Erdős–Rényi clusters and block-wise
    /// identical noise.
    Rim {
        sizes: Vec<usize>,
        within: Vec<f64>,
        p: Vec<f64>,
        noise_w: Vec<f64>,
        weights: WeightDistribution,
    },
}

impl Model {
    pub fn from_kv(kv: &KeyValues) -> Result<Self, CliError> {
        let sizes: Vec<usize> = kv
            .list("sizes")?
            .ok_or_else(|| CliError::usage("missing key 'sizes'"))?;
        let model = kv.raw("model").unwrap_or("two_layer");
        let p: Vec<f64> = kv
            .list("p")?
            .ok_or_else(|| CliError::usage("missing key 'p'"))?;
        match model {
            "two_layer" => {
                let q: Vec<f64> = kv
                    .list("q")?
                    .ok_or_else(|| CliError::usage("missing key 'q'"))?;
                let q: [f64; 4] = q
                    .try_into()
                    .map_err(|_| CliError::usage("'q' needs 4 values (q11, q10, q01, q00)"))?;
                let p: [f64; 2] = p
                    .try_into()
                    .map_err(|_| CliError::usage("'p' needs 2 values for the two-layer model"))?;
                Ok(Model::TwoLayer { sizes, q, p })
            }
            "rim" => {
                let within: Vec<f64> = kv
                    .list("within")?
                    .ok_or_else(|| CliError::usage("missing key 'within'"))?;
                let noise_w = kv.list("noise_w")?.unwrap_or_else(|| vec![1.0; p.len()]);
                let weights = match kv.raw("weights").unwrap_or("constant") {
                    "constant" => WeightDistribution::Constant,
                    "uniform" => WeightDistribution::Uniform,
                    other => return Err(CliError::usage(format!("unknown weights '{other}'"))),
                };
                if within.len() != p.len() || noise_w.len() != p.len() {
                    return Err(CliError::usage("'within', 'p' and 'noise_w' need one value per layer"));
                }
                Ok(Model::Rim { sizes, within, p, noise_w, weights })
            }
            other => Err(CliError::usage(format!("unknown model '{other}'"))),
        }
    }

    pub fn layers(&self) -> usize {
        match self {
            Model::TwoLayer { .. } => 2,
            Model::Rim { p, .. } => p.len(),
        }
    }

    /// Between-cluster connection probability of a layer.
    pub fn noise_p(&self, layer: usize) -> f64 {
        match self {
            Model::TwoLayer { p, .. } => p[layer],
            Model::Rim { p, .. } => p[layer],
        }
    }

    pub fn set_noise_p(&mut self, layer: usize, value: f64) -> Result<(), CliError> {
        if layer >= self.layers() {
            return Err(CliError::usage(format!("model has no layer {}", layer + 1)));
        }
        match self {
            Model::TwoLayer { p, .. } => p[layer] = value,
            Model::Rim { p, .. } => p[layer] = value,
        }
        Ok(())
    }

    /// True noise level `p · W̄` per layer.
    pub fn noise_levels(&self) -> Vec<f64> {
        match self {
            Model::TwoLayer { p, .. } => p.to_vec(),
            Model::Rim { p, noise_w, .. } => p.iter().zip(noise_w).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn generate(&self, seed: u64) -> Result<(MultilayerGraph, ClusterAssignment), CliError> {
        let out = match self {
            Model::TwoLayer { sizes, q, p } => generate_two_layer(&TwoLayerParams {
                cluster_sizes: sizes.clone(),
                q: *q,
                p: *p,
                seed,
            }),
            Model::Rim { sizes, within, p, noise_w, weights } => generate_rim(&RimParams {
                cluster_sizes: sizes.clone(),
                layers: p.len(),
                within: WithinSpec::ErdosRenyi(within.iter().map(|&q| vec![q; sizes.len()]).collect()),
                noise: NoiseSpec::Identical(p.iter().copied().zip(noise_w.iter().copied()).collect()),
                weights: *weights,
                seed,
            }),
        };
        out.map_err(CliError::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_layer_from_kv() {
        let kv = KeyValues::parse("sizes = 5,5\nq = 0.3,0.2,0.1,0.4\np = 0.1,0.2\n").unwrap();
        let mut m = Model::from_kv(&kv).unwrap();
        assert_eq!(m.layers(), 2);
        assert_eq!(m.noise_levels(), vec![0.1, 0.2]);
        m.set_noise_p(1, 0.5).unwrap();
        assert_eq!(m.noise_p(1), 0.5);
        assert!(m.set_noise_p(2, 0.5).is_err());
        let (g, a) = m.generate(3).unwrap();
        assert_eq!((g.n(), a.k()), (10, 2));
    }

    #[test]
    fn rim_from_kv() {
        let kv = KeyValues::parse(
            "model = rim\nsizes = 4,4,4\nwithin = 0.9,0.8,0.7\np = 0.1,0.1,0.2\nnoise_w = 1,2,1\n",
        )
        .unwrap();
        let m = Model::from_kv(&kv).unwrap();
        assert_eq!(m.layers(), 3);
        assert_eq!(m.noise_levels(), vec![0.1, 0.2, 0.2]);
        let bad = KeyValues::parse("model = rim\nsizes = 4\nwithin = 0.9\np = 0.1,0.1\n").unwrap();
        assert!(Model::from_kv(&bad).is_err());
    }
}
