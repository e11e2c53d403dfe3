//! `multisgc` command-line tool.
//!
//! Exit codes: 0 success, 2 usage / validation / I/O errors, 3 MIMOSA found
//! no reliable clustering, 4 numerical failure (no convergence, disconnected
//! aggregate).

mod kv;
mod model;
mod sweep;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde_json::{json, Value};

use multisgc::metrics::evaluate;
use multisgc::mimosa::{run_mimosa, serialize_result, MimosaConfig, MimosaStatus};
use multisgc::noise::estimate_noise;
use multisgc::spectral::smallest_eigenpairs;
use multisgc::theory::{
    breakdown_condition_holds, breakdown_matrix, critical_bounds, critical_weight_w1,
    predicted_partial_sum,
};
use multisgc::{ClusterAssignment, Error, LayerWeights, MultilayerGraph};

use kv::{parse_list, KeyValues};
use model::{Model, MODEL_KEYS};
use sweep::{render_csv, run_sweep, MeanKind, SweepSpec};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Convergence { .. } | Error::NotConnected { .. } => 4,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(name = "multisgc", version, about = "Multilayer spectral graph clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a synthetic multilayer graph with ground-truth labels.
    Generate(GenerateArgs),
    /// Spectral clustering of the aggregate for a fixed weight vector and K.
    Cluster(ClusterArgs),
    /// Automatic choice of K and layer weights.
    Mimosa(MimosaArgs),
    /// Monte-Carlo sweep over noise levels, weights or tau; CSV output.
    Sweep(SweepArgs),
    /// Clustering quality metrics.
    Evaluate(EvaluateArgs),
    /// Phase-transition bounds and predicates for given clusters.
    TheoryCheck(TheoryArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Generator parameter file (key = value lines).
    #[arg(long)]
    params: PathBuf,
    /// Edge-list output path.
    #[arg(long)]
    graph: PathBuf,
    /// Ground-truth label output path.
    #[arg(long)]
    labels: PathBuf,
    /// Overrides the file's seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    /// Comma-separated layer weights (default uniform).
    #[arg(long)]
    w: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Degree-normalize unweighted layers first.
    #[arg(long)]
    normalize: bool,
    /// Write labels here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MimosaArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    w_ini: Option<String>,
    /// Comma-separated tau values.
    #[arg(long)]
    tau_set: Option<String>,
    #[arg(long)]
    eta: Option<f64>,
    /// One value, or one per layer.
    #[arg(long)]
    alpha: Option<String>,
    /// One value, or one per layer.
    #[arg(long)]
    alpha_prime: Option<String>,
    #[arg(long)]
    max_k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep specification file (key = value lines).
    #[arg(long)]
    spec: PathBuf,
    /// Append mean rows (over trials and the w1 axis).
    #[arg(long, value_enum, default_value = "none")]
    mean: MeanKind,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Labels to score.
    #[arg(long)]
    found: PathBuf,
    /// Ground-truth labels; enables NMI, RI and F-measure.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    w: Option<String>,
    /// Per-layer between-cluster probabilities replacing the estimates.
    #[arg(long)]
    noise_p: Option<String>,
    /// Per-layer mean between-cluster weights (default 1 with --noise-p).
    #[arg(long)]
    noise_wbar: Option<String>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_graph(path: &Path, normalize: bool) -> Result<MultilayerGraph, CliError> {
    let g = MultilayerGraph::parse_edge_list(&read(path)?)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    Ok(if normalize { g.degree_normalize() } else { g })
}

fn load_labels(path: &Path, g: &MultilayerGraph) -> Result<ClusterAssignment, CliError> {
    ClusterAssignment::parse_label_file(&read(path)?, g.node_ids())
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn floats(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    parse_list(s).map_err(|e| CliError::usage(format!("{what}: {e}")))
}

fn weights(s: Option<&str>, layers: usize, what: &str) -> Result<LayerWeights, CliError> {
    match s {
        None => Ok(LayerWeights::uniform(layers)),
        Some(s) => {
            let v = floats(s, what)?;
            if v.len() != layers {
                return Err(CliError::usage(format!("{what}: expected {layers} values, got {}", v.len())));
            }
            LayerWeights::new(v).map_err(|e| CliError::usage(format!("{what}: {e}")))
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value serializes");
    s.push('\n');
    s
}

fn cmd_generate(a: &GenerateArgs) -> Result<u8, CliError> {
    let kv = KeyValues::parse(&read(&a.params)?)?;
    kv.check_known(&MODEL_KEYS)?;
    let model = Model::from_kv(&kv)?;
    let seed = match a.seed {
        Some(s) => s,
        None => kv.get("seed")?.unwrap_or(0),
    };
    let w = weights(kv.raw("w"), model.layers(), "w")?;
    let (g, truth) = model.generate(seed)?;
    write(&a.graph, &g.to_edge_list())?;
    write(&a.labels, &truth.to_label_file(g.node_ids()))?;
    let bounds = critical_bounds(&g, &truth, &w)?;
    let doc = json!({
        "nodes": g.n(),
        "layers": g.num_layers(),
        "edges": g.layers().iter().map(|l| l.num_edges()).collect::<Vec<_>>(),
        "w": w.as_slice(),
        "t": model.noise_levels(),
        "t_w": w.dot(&model.noise_levels()),
        "bounds": bounds,
    });
    print!("{}", pretty(&doc));
    Ok(0)
}

fn cmd_cluster(a: &ClusterArgs) -> Result<u8, CliError> {
    let g = load_graph(&a.graph, a.normalize)?;
    let w = weights(a.w.as_deref(), g.num_layers(), "--w")?;
    let (assignment, _) = multisgc::multilayer_sgc(&g, &w, a.k, a.seed)?;
    emit(a.output.as_deref(), &assignment.to_label_file(g.node_ids()))?;
    Ok(0)
}

fn per_layer_levels(s: Option<&str>, what: &str) -> Result<Vec<f64>, CliError> {
    match s {
        None => Ok(vec![0.05]),
        Some(s) => floats(s, what),
    }
}

fn cmd_mimosa(a: &MimosaArgs) -> Result<u8, CliError> {
    let g = load_graph(&a.graph, a.normalize)?;
    let defaults = MimosaConfig::default();
    let config = MimosaConfig {
        w_ini: match &a.w_ini {
            Some(s) => Some(weights(Some(s), g.num_layers(), "--w-ini")?),
            None => None,
        },
        tau_set: match &a.tau_set {
            Some(s) => floats(s, "--tau-set")?,
            None => defaults.tau_set,
        },
        eta: a.eta.unwrap_or(defaults.eta),
        alpha: per_layer_levels(a.alpha.as_deref(), "--alpha")?,
        alpha_prime: per_layer_levels(a.alpha_prime.as_deref(), "--alpha-prime")?,
        max_k: a.max_k,
        seed: a.seed,
    };
    match run_mimosa(&g, &config) {
        Ok(r) => {
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            emit(a.output.as_deref(), &serialize_result(&r, g.node_ids()))?;
            Ok(if r.status == MimosaStatus::Found { 0 } else { 3 })
        }
        Err(f) => {
            let err = CliError::from(f.error.clone());
            if err.code == 4 {
                let doc = json!({"status": "error", "error": f.error.to_string(), "trace": f.trace});
                emit(a.output.as_deref(), &pretty(&doc))?;
            }
            Err(err)
        }
    }
}

fn cmd_sweep(a: &SweepArgs) -> Result<u8, CliError> {
    let spec = SweepSpec::from_kv(&KeyValues::parse(&read(&a.spec)?)?)?;
    let rows = match a.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| CliError::usage(e.to_string()))?
            .install(|| run_sweep(&spec))?,
        None => run_sweep(&spec)?,
    };
    for r in &rows {
        if let Some(w) = &r.warning {
            eprintln!("warning: point {:?} trial {}: {w}", r.point, r.trial);
        }
    }
    emit(a.output.as_deref(), &render_csv(&spec, &rows, a.mean))?;
    Ok(0)
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<u8, CliError> {
    let g = load_graph(&a.graph, false)?;
    let found = load_labels(&a.found, &g)?;
    let truth = match &a.truth {
        Some(p) => Some(load_labels(p, &g)?),
        None => None,
    };
    let report = evaluate(&g, &found, truth.as_ref())?;
    let v = serde_json::to_value(&report).expect("report serializes");
    print!("{}", pretty(&v));
    Ok(0)
}

fn cmd_theory(a: &TheoryArgs) -> Result<u8, CliError> {
    let g = load_graph(&a.graph, false)?;
    let labels = load_labels(&a.labels, &g)?;
    let layers = g.num_layers();
    let w = weights(a.w.as_deref(), layers, "--w")?;
    let k = labels.k();
    if k < 2 {
        return Err(CliError::usage("labels define a single cluster"));
    }
    let bounds = critical_bounds(&g, &labels, &w)?;

    // per-layer K×K noise-level matrices, estimated or overridden
    let (source, t_mats, p_layers): (&str, Vec<DMatrix<f64>>, Vec<f64>) = match &a.noise_p {
        Some(s) => {
            let p = floats(s, "--noise-p")?;
            let wbar = match &a.noise_wbar {
                Some(s) => floats(s, "--noise-wbar")?,
                None => vec![1.0; layers],
            };
            if p.len() != layers || wbar.len() != layers {
                return Err(CliError::usage(format!("noise overrides need {layers} values")));
            }
            let mats = p
                .iter()
                .zip(&wbar)
                .map(|(p, b)| DMatrix::from_fn(k, k, |i, j| if i == j { 0.0 } else { p * b }))
                .collect();
            ("override", mats, p.iter().zip(&wbar).map(|(p, b)| p * b).collect())
        }
        None => {
            let est = estimate_noise(&g, &labels)?;
            let mats = (0..layers)
                .map(|l| DMatrix::from_fn(k, k, |i, j| if i == j { 0.0 } else { est.pair(l, i, j).t_hat }))
                .collect();
            ("estimated", mats, est.t_hat())
        }
    };
    let t_max: Vec<f64> = t_mats.iter().map(|m| m.max()).collect();
    let t_w = w.dot(&p_layers);
    let t_max_w = w.dot(&t_max);

    let agg = g.aggregate(&w)?;
    let emb = smallest_eigenpairs(&agg, k)?;
    let s2k = emb.eigenvalues.iter().sum::<f64>();
    let wt = breakdown_matrix(labels.sizes(), &t_mats, &w)?;
    let breakdown = breakdown_condition_holds(&wt, &emb.eigenvalues, g.n());
    let predicted = predicted_partial_sum(t_w, &bounds);

    let mut doc = json!({
        "bounds": bounds,
        "c_star": bounds.c_star(),
        "noise": {
            "source": source,
            "t": p_layers,
            "t_max": t_max,
            "t_w": t_w,
            "t_max_w": t_max_w,
        },
        "eigenvalues": emb.eigenvalues,
        "lambda_k_plus_1": emb.lambda_kplus1,
        "s2k_over_n": s2k / g.n() as f64,
        "predicted_s2k_over_n": predicted,
        "breakdown_matrix": wt.row_iter().map(|r| r.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>(),
        "breakdown_condition": breakdown,
        "reliable_regime": t_w < bounds.t_lb,
    });
    if layers == 2 {
        let nf = g.n() as f64;
        let s: Vec<f64> = bounds
            .layer_cluster_sums
            .iter()
            .map(|l| l.iter().copied().fold(f64::INFINITY, f64::min) / nf)
            .collect();
        let cw = critical_weight_w1([p_layers[0], p_layers[1]], [s[0], s[1]], k);
        doc["critical_weight"] = serde_json::to_value(cw).expect("serializes");
    }
    print!("{}", pretty(&doc));
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Cluster(a) => cmd_cluster(a),
        Command::Mimosa(a) => cmd_mimosa(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::TheoryCheck(a) => cmd_theory(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
