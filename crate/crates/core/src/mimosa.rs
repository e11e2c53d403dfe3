//! MIMOSA: iterative model-order selection for multilayer spectral
//! clustering. `K` grows from 2 until some adapted layer weight vector yields
//! clusters that pass the homogeneity test and one of the two reliability
//! tests; among those the weight vector with the largest SNR wins.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::assignment::ClusterAssignment;
use crate::error::{Error, Result};
use crate::graph::{LayerWeights, MultilayerGraph};
use crate::noise::{
    anscombe_nonidentical_test, estimate_noise, glrt_identical_noise, vtest_all, AnscombeOutcome,
    GlrtOutcome,
};
use crate::spectral::{sgc_aggregated, SpectralEmbedding};
use crate::theory::aggregated_cluster_sums;

pub const DEFAULT_TAU_SET: [f64; 8] = [0.0, 0.1, 1.0, 10.0, 1e2, 1e3, 1e4, 1e5];

#[derive(Debug, Clone, PartialEq)]
pub struct MimosaConfig {
    /// Initial weights; uniform when `None`.
    pub w_ini: Option<LayerWeights>,
    pub tau_set: Vec<f64>,
    pub eta: f64,
    /// Per-layer GLRT levels; a single value applies to every layer.
    pub alpha: Vec<f64>,
    /// Per-layer Anscombe-test levels; a single value applies to every layer.
    pub alpha_prime: Vec<f64>,
    /// Largest `K` tried; `⌊n/2⌋` when `None`.
    pub max_k: Option<usize>,
    pub seed: u64,
}

impl Default for MimosaConfig {
    fn default() -> Self {
        Self {
            w_ini: None,
            tau_set: DEFAULT_TAU_SET.to_vec(),
            eta: 1e-5,
            alpha: vec![0.05],
            alpha_prime: vec![0.05],
            max_k: None,
            seed: 0,
        }
    }
}

impl MimosaConfig {
    fn validate(&self, layers: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if let Some(w) = &self.w_ini {
            if w.len() != layers {
                return Err(Error::DimensionMismatch {
                    expected: layers,
                    got: w.len(),
                });
            }
        }
        if self.tau_set.is_empty() || self.tau_set.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return bad(format!("tau values must be finite and nonnegative: {:?}", self.tau_set));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return bad(format!("eta {} outside (0, 1)", self.eta));
        }
        for (name, v) in [("alpha", &self.alpha), ("alpha'", &self.alpha_prime)] {
            if v.len() != 1 && v.len() != layers {
                return bad(format!("{name} needs 1 or {layers} values, got {}", v.len()));
            }
            if v.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
                return bad(format!("{name} values must lie in (0, 1): {v:?}"));
            }
        }
        Ok(())
    }
}

fn per_layer(v: &[f64], l: usize) -> f64 {
    if v.len() == 1 {
        v[0]
    } else {
        v[l]
    }
}

/// `w_ℓ ∝ w_ini,ℓ / (1 + τ t̂_ℓ)`, renormalized.
pub fn adapt_weights(w_ini: &LayerWeights, t_hat: &[f64], tau: f64) -> LayerWeights {
    let raw: Vec<f64> = w_ini
        .as_slice()
        .iter()
        .zip(t_hat)
        .map(|(w, t)| w / (1.0 + tau * t))
        .collect();
    LayerWeights::new(raw).expect("adapted weights keep a positive sum")
}

/// `t̂_LB / t̂^w`, infinite for a noiseless aggregate.
pub fn snr(t_lb_hat: f64, t_hat_w: f64) -> f64 {
    if t_hat_w > 0.0 {
        t_lb_hat / t_hat_w
    } else {
        f64::INFINITY
    }
}

mod inf_float {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if x.is_infinite() && *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("invalid number '{t}'"))),
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
            match x {
                Some(v) => super::serialize(v, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
            Ok(Option::<Repr>::deserialize(d)?.map(|r| match r {
                Repr::Num(x) => x,
                Repr::Text(_) => f64::INFINITY,
            }))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepOutcome {
    /// Spectral clustering could not run (component too small, no
    /// convergence).
    SgcFailed,
    /// Some detected cluster has fewer than `K` nodes.
    ClusterTooSmall,
    /// A homogeneity p-value fell to `η` or below.
    HomogeneityRejected,
    /// Identical-noise test accepted in every layer.
    IdenticalNoise,
    /// Identical-noise test rejected in some layer.
    NonIdenticalNoise,
}

/// Record of one `(K, τ)` iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub k: usize,
    pub tau: f64,
    pub w: Vec<f64>,
    pub outcome: StepOutcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_vtest_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_hat: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_lb_hat: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub glrt: Vec<GlrtOutcome>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub anscombe: Vec<AnscombeOutcome>,
    pub reliable: bool,
    #[serde(default, with = "inf_float::option", skip_serializing_if = "Option::is_none")]
    pub snr: Option<f64>,
    /// Connected components of the aggregate when it was not connected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TraceEntry {
    fn new(k: usize, tau: f64, w: &LayerWeights) -> Self {
        Self {
            k,
            tau,
            w: w.as_slice().to_vec(),
            outcome: StepOutcome::SgcFailed,
            cluster_sizes: None,
            min_vtest_p: None,
            t_hat: None,
            t_max: None,
            t_w: None,
            t_max_w: None,
            t_lb_hat: None,
            glrt: Vec::new(),
            anscombe: Vec::new(),
            reliable: false,
            snr: None,
            components: None,
            error: None,
        }
    }
}

/// All iterations at one `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KStep {
    pub k: usize,
    /// Noise estimated from the clusters found with `w_ini`.
    pub t_ini: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<usize>,
    pub entries: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliableEntry {
    pub k: usize,
    pub tau: f64,
    pub trace_index: usize,
    pub w: Vec<f64>,
    pub assignment: ClusterAssignment,
    #[serde(with = "inf_float")]
    pub snr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MimosaStatus {
    Found,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MimosaResult {
    pub status: MimosaStatus,
    pub k: Option<usize>,
    /// Final clusters over all nodes (extra components appended as
    /// pseudo-clusters when the aggregate was disconnected).
    pub assignment: Option<ClusterAssignment>,
    pub w_star: Option<LayerWeights>,
    pub snr: Option<f64>,
    pub tau_star: Option<f64>,
    pub reliable_set: Vec<ReliableEntry>,
    pub trace: Vec<KStep>,
    pub warnings: Vec<String>,
    /// Spectral clusterings actually computed (cache hits excluded).
    pub sgc_invocations: usize,
}

/// A numerical failure, with the trace gathered up to that point.
#[derive(Debug, Clone)]
pub struct MimosaFailure {
    pub error: Error,
    pub trace: Vec<KStep>,
}

impl std::fmt::Display for MimosaFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.error)
    }
}

impl std::error::Error for MimosaFailure {}

/// Clustering of the full node set together with the part the tests run
/// on (the whole graph, or its largest component).
#[derive(Clone)]
struct Clustering {
    full: ClusterAssignment,
    /// Nodes of the largest component when the aggregate is disconnected.
    sub_nodes: Option<Vec<usize>>,
    sub: ClusterAssignment,
    components: usize,
    embedding: SpectralEmbedding,
}

struct Runner<'a> {
    graph: &'a MultilayerGraph,
    seed: u64,
    cache: HashMap<(usize, Vec<u64>), std::result::Result<Clustering, Error>>,
    invocations: usize,
}

impl Runner<'_> {
    fn cluster(
        &mut self,
        w: &LayerWeights,
        k: usize,
        warm: &[Vec<f64>],
    ) -> std::result::Result<Clustering, Error> {
        let key = (k, w.as_slice().iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        self.invocations += 1;
        let result = self.cluster_uncached(w, k, warm);
        self.cache.insert(key, result.clone());
        result
    }

    fn cluster_uncached(
        &self,
        w: &LayerWeights,
        k: usize,
        warm: &[Vec<f64>],
    ) -> std::result::Result<Clustering, Error> {
        let agg = self.graph.aggregate(w)?;
        let comps = agg.connected_components();
        if comps.len() == 1 {
            let (a, emb) = sgc_aggregated(&agg, k, self.seed, warm)?;
            return Ok(Clustering {
                full: a.clone(),
                sub_nodes: None,
                sub: a,
                components: 1,
                embedding: emb,
            });
        }
        let largest = comps
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| a.len().cmp(&b.len()).then(j.cmp(i)))
            .map(|(i, _)| i)
            .unwrap();
        let nodes = comps[largest].clone();
        if nodes.len() <= k {
            return Err(Error::InvalidArgument(format!(
                "largest component has {} nodes, too few for K={k}",
                nodes.len()
            )));
        }
        let sub_graph = agg.induced(&nodes);
        let local_warm: Vec<Vec<f64>> = warm
            .iter()
            .filter(|v| v.len() == self.graph.n())
            .map(|v| nodes.iter().map(|&u| v[u]).collect())
            .collect();
        let (sub, emb) = sgc_aggregated(&sub_graph, k, self.seed, &local_warm)?;
        let mut labels = vec![usize::MAX; self.graph.n()];
        for (&u, &l) in nodes.iter().zip(sub.labels()) {
            labels[u] = l;
        }
        let mut next = k;
        for (c, comp) in comps.iter().enumerate() {
            if c != largest {
                for &u in comp {
                    labels[u] = next;
                }
                next += 1;
            }
        }
        Ok(Clustering {
            full: ClusterAssignment::from_labels(labels),
            sub_nodes: Some(nodes),
            sub,
            components: comps.len(),
            embedding: emb,
        })
    }
}

/// Embedding vectors lifted back to the full node set (zero outside the
/// clustered component) for warm starts.
fn warm_vectors(c: &Clustering, n: usize) -> Vec<Vec<f64>> {
    let vs = c.embedding.ritz_vectors();
    match &c.sub_nodes {
        None => vs,
        Some(nodes) => vs
            .into_iter()
            .map(|v| {
                let mut full = vec![0.0; n];
                for (&u, x) in nodes.iter().zip(v) {
                    full[u] = x;
                }
                full
            })
            .collect(),
    }
}

/// Runs the reliability tests for one adapted weight vector.
fn evaluate_step(
    graph: &MultilayerGraph,
    config: &MimosaConfig,
    k: usize,
    w: &LayerWeights,
    clustering: &Clustering,
    entry: &mut TraceEntry,
) -> Result<()> {
    let owned;
    let g = match &clustering.sub_nodes {
        Some(nodes) => {
            owned = graph.induced_subgraph(nodes);
            &owned
        }
        None => graph,
    };
    let a = &clustering.sub;
    entry.cluster_sizes = Some(a.sizes().to_vec());
    if clustering.components > 1 {
        entry.components = Some(clustering.components);
    }
    if a.k() < k || a.n_min() < k {
        entry.outcome = StepOutcome::ClusterTooSmall;
        return Ok(());
    }
    let min_p = vtest_all(g, a)
        .iter()
        .map(|v| v.p_value)
        .fold(1.0, f64::min);
    entry.min_vtest_p = Some(min_p);
    if min_p <= config.eta {
        entry.outcome = StepOutcome::HomogeneityRejected;
        return Ok(());
    }
    let est = estimate_noise(g, a)?;
    let sums = aggregated_cluster_sums(g, a, w)?;
    let s_min = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let t_lb = s_min / ((k - 1) as f64 * a.n_max() as f64);
    let t_w = est.t_w(w);
    let t_max_w = est.t_max_w(w);
    entry.t_hat = Some(est.t_hat());
    entry.t_max = Some(est.t_max());
    entry.t_w = Some(t_w);
    entry.t_max_w = Some(t_max_w);
    entry.t_lb_hat = Some(t_lb);
    entry.glrt = (0..g.num_layers())
        .map(|l| glrt_identical_noise(&est, l, per_layer(&config.alpha, l)))
        .collect::<Result<_>>()?;
    if entry.glrt.iter().all(|r| r.accept) {
        entry.outcome = StepOutcome::IdenticalNoise;
        entry.reliable = t_w < t_lb;
    } else {
        entry.outcome = StepOutcome::NonIdenticalNoise;
        entry.anscombe = (0..g.num_layers())
            .map(|l| anscombe_nonidentical_test(&est, l, t_lb, per_layer(&config.alpha_prime, l)))
            .collect::<Result<_>>()?;
        entry.reliable = entry.anscombe.iter().all(|r| r.accept) && t_max_w < t_lb;
    }
    entry.snr = Some(snr(t_lb, t_w));
    Ok(())
}

fn is_numerical(e: &Error) -> bool {
    matches!(e, Error::Convergence { .. })
}

/// Runs the full model-order selection loop.
pub fn run_mimosa(graph: &MultilayerGraph, config: &MimosaConfig) -> std::result::Result<MimosaResult, Box<MimosaFailure>> {
    let fail = |error: Error, trace: Vec<KStep>| Box::new(MimosaFailure { error, trace });
    let n = graph.n();
    if n < 4 {
        return Err(fail(
            Error::InvalidArgument(format!("need at least 4 nodes, got {n}")),
            Vec::new(),
        ));
    }
    if let Err(e) = config.validate(graph.num_layers()) {
        return Err(fail(e, Vec::new()));
    }
    let w_ini = config
        .w_ini
        .clone()
        .unwrap_or_else(|| LayerWeights::uniform(graph.num_layers()));
    let max_k = config.max_k.unwrap_or(n / 2).min(n - 1);

    let mut runner = Runner {
        graph,
        seed: config.seed,
        cache: HashMap::new(),
        invocations: 0,
    };
    let mut trace: Vec<KStep> = Vec::new();
    let mut reliable: Vec<ReliableEntry> = Vec::new();
    let mut full_assignments: BTreeMap<usize, ClusterAssignment> = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut warm: Vec<Vec<f64>> = Vec::new();
    let mut trace_index = 0;

    let mut k = 2;
    while k <= max_k {
        let base = match runner.cluster(&w_ini, k, &warm) {
            Ok(c) => c,
            Err(e) if is_numerical(&e) => return Err(fail(e, trace)),
            Err(e) => {
                warnings.push(format!("K={k}: clustering with the initial weights failed: {e}"));
                break;
            }
        };
        if base.components > 1 {
            warnings.push(format!(
                "K={k}: aggregated graph has {} components; clustering the largest",
                base.components
            ));
        }
        warm = warm_vectors(&base, n);
        let base_graph;
        let g_base = match &base.sub_nodes {
            Some(nodes) => {
                base_graph = graph.induced_subgraph(nodes);
                &base_graph
            }
            None => graph,
        };
        let t_ini = match estimate_noise(g_base, &base.sub) {
            Ok(e) => e.t_hat(),
            Err(e) => return Err(fail(e, trace)),
        };
        let mut step = KStep {
            k,
            t_ini: t_ini.clone(),
            components: (base.components > 1).then_some(base.components),
            entries: Vec::with_capacity(config.tau_set.len()),
        };
        for &tau in &config.tau_set {
            let w = adapt_weights(&w_ini, &t_ini, tau);
            let mut entry = TraceEntry::new(k, tau, &w);
            match runner.cluster(&w, k, &warm) {
                Ok(c) => {
                    if let Err(e) = evaluate_step(graph, config, k, &w, &c, &mut entry) {
                        trace.push(step);
                        return Err(fail(e, trace));
                    }
                    if entry.reliable {
                        full_assignments.insert(trace_index, c.full.clone());
                        reliable.push(ReliableEntry {
                            k,
                            tau,
                            trace_index,
                            w: entry.w.clone(),
                            assignment: c.full,
                            snr: entry.snr.unwrap(),
                        });
                    }
                }
                Err(e) if is_numerical(&e) => {
                    trace.push(step);
                    return Err(fail(e, trace));
                }
                Err(e) => entry.error = Some(e.to_string()),
            }
            step.entries.push(entry);
            trace_index += 1;
        }
        trace.push(step);
        if !reliable.is_empty() {
            break;
        }
        k += 1;
    }

    let best = reliable.iter().min_by(|a, b| {
        b.snr
            .total_cmp(&a.snr)
            .then(a.tau.total_cmp(&b.tau))
            .then(a.trace_index.cmp(&b.trace_index))
    });
    let result = match best {
        Some(b) => MimosaResult {
            status: MimosaStatus::Found,
            k: Some(b.k),
            assignment: Some(b.assignment.clone()),
            w_star: Some(LayerWeights::new(b.w.clone()).expect("weights on the simplex")),
            snr: Some(b.snr),
            tau_star: Some(b.tau),
            reliable_set: reliable.clone(),
            trace,
            warnings,
            sgc_invocations: runner.invocations,
        },
        None => MimosaResult {
            status: MimosaStatus::NotApplicable,
            k: None,
            assignment: None,
            w_star: None,
            snr: None,
            tau_star: None,
            reliable_set: Vec::new(),
            trace,
            warnings,
            sgc_invocations: runner.invocations,
        },
    };
    Ok(result)
}

/// Serialized form of a result: keys sorted, labels keyed by node id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Document {
    status: MimosaStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w_star: Option<Vec<f64>>,
    #[serde(default, with = "inf_float::option", skip_serializing_if = "Option::is_none")]
    snr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    reliable_set: Vec<ReliableEntry>,
    trace: Vec<KStep>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
    sgc_invocations: usize,
}

/// Deterministic JSON document with sorted keys.
pub fn serialize_result(result: &MimosaResult, node_ids: &[String]) -> String {
    let found = result.status == MimosaStatus::Found;
    let doc = Document {
        status: result.status,
        k: result.k,
        labels: result.assignment.as_ref().map(|a| {
            node_ids
                .iter()
                .cloned()
                .zip(a.labels().iter().copied())
                .collect()
        }),
        w_star: result.w_star.as_ref().map(|w| w.as_slice().to_vec()),
        snr: result.snr,
        tau_star: result.tau_star,
        reliable_set: if found { result.reliable_set.clone() } else { Vec::new() },
        trace: result.trace.clone(),
        warnings: result.warnings.clone(),
        sgc_invocations: result.sgc_invocations,
    };
    // going through Value sorts every object's keys
    let value = serde_json::to_value(&doc).expect("result serializes");
    let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
    s.push('\n');
    s
}

pub fn parse_result(text: &str, node_ids: &[String]) -> Result<MimosaResult> {
    let doc: Document = serde_json::from_str(text)
        .map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
    let assignment = match doc.labels {
        Some(map) => {
            let mut labels = Vec::with_capacity(node_ids.len());
            for id in node_ids {
                let l = map.get(id).ok_or_else(|| {
                    Error::InvalidArgument(format!("result document has no label for '{id}'"))
                })?;
                labels.push(*l);
            }
            Some(ClusterAssignment::from_labels(labels))
        }
        None => None,
    };
    Ok(MimosaResult {
        status: doc.status,
        k: doc.k,
        assignment,
        w_star: doc.w_star.map(LayerWeights::new).transpose()?,
        snr: doc.snr,
        tau_star: doc.tau_star,
        reliable_set: doc.reliable_set,
        trace: doc.trace,
        warnings: doc.warnings,
        sgc_invocations: doc.sgc_invocations,
    })
}
