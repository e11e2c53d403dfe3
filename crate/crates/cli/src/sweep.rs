//! Parameter sweeps: generate, cluster and score every grid point × trial.
//!
//! Spec file keys (besides the generator keys): `trials`, `mode`
//! (`sgc` | `mimosa`), `k`, `link_p` (second layer's `p` follows the first),
//! and grid axes `axis.<p1|p2|w1|tau> = start:stop:step`. Axes combine as a
//! Cartesian product in the fixed order p1, p2, w1, tau, the last varying
//! fastest.

use rayon::prelude::*;

use multisgc::mimosa::{adapt_weights, run_mimosa, MimosaConfig, MimosaStatus};
use multisgc::synth::detectability;
use multisgc::theory::critical_bounds;
use multisgc::{multilayer_sgc, partial_eigenvalue_sum, LayerWeights};

use crate::kv::KeyValues;
use crate::model::{Model, MODEL_KEYS};
use crate::CliError;

pub const AXES: [&str; 4] = ["p1", "p2", "w1", "tau"];
const VALUE_COLUMNS: [&str; 6] = ["trial", "detectability", "t_w", "t_LB_hat", "t_UB_hat", "S2K_over_n"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sgc,
    Mimosa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MeanKind {
    None,
    Arithmetic,
    Geometric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: &'static str,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub model: Model,
    pub w: LayerWeights,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub mode: Mode,
    pub link_p: bool,
    pub axes: Vec<Axis>,
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
pub fn parse_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let [a, b, c] = parts[..] else {
        return Err(format!("'{s}' is not start:stop:step"));
    };
    let num = |x: &str| x.parse::<f64>().map_err(|e| format!("'{x}': {e}"));
    let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(format!("'{s}' has non-finite values"));
    }
    if step <= 0.0 {
        return Err(format!("step must be positive in '{s}'"));
    }
    if start > stop {
        return Err(format!("start exceeds stop in '{s}'"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(format!("'{s}' has too many points"));
    }
    // rounding keeps 0.1 + 2·0.1 from printing as 0.30000000000000004
    Ok((0..count)
        .map(|i| {
            let x = start + i as f64 * step;
            (x * 1e12).round() / 1e12
        })
        .collect())
}

impl SweepSpec {
    pub fn from_kv(kv: &KeyValues) -> Result<Self, CliError> {
        let mut allowed: Vec<&str> = MODEL_KEYS.to_vec();
        allowed.extend(["trials", "mode", "k", "link_p", "axis."]);
        kv.check_known(&allowed)?;
        let model = Model::from_kv(kv)?;
        let layers = model.layers();
        let w = match kv.list::<f64>("w")? {
            Some(v) => {
                if v.len() != layers {
                    return Err(CliError::usage(format!("'w' needs {layers} values")));
                }
                LayerWeights::new(v)?
            }
            None => LayerWeights::uniform(layers),
        };
        let clusters = match &model {
            Model::TwoLayer { sizes, .. } | Model::Rim { sizes, .. } => sizes.len(),
        };
        let trials = kv.get("trials")?.unwrap_or(1);
        if trials == 0 {
            return Err(CliError::usage("trials must be at least 1"));
        }
        let mode = match kv.raw("mode").unwrap_or("sgc") {
            "sgc" => Mode::Sgc,
            "mimosa" => Mode::Mimosa,
            other => return Err(CliError::usage(format!("unknown mode '{other}'"))),
        };
        let link_p = kv.get("link_p")?.unwrap_or(false);
        let mut axes = Vec::new();
        for name in AXES {
            let key = format!("axis.{name}");
            if let Some(raw) = kv.raw(&key) {
                let values = parse_range(raw).map_err(|e| CliError::usage(format!("'{key}': {e}")))?;
                axes.push(Axis { name, values });
            }
        }
        for k in kv.keys() {
            if let Some(name) = k.strip_prefix("axis.") {
                if !AXES.contains(&name) {
                    return Err(CliError::usage(format!("unknown axis '{name}' (p1, p2, w1, tau)")));
                }
            }
        }
        let has = |n: &str| axes.iter().any(|a| a.name == n);
        if has("w1") && layers != 2 {
            return Err(CliError::usage("axis 'w1' needs a two-layer model"));
        }
        if has("p2") && layers < 2 {
            return Err(CliError::usage("axis 'p2' needs at least two layers"));
        }
        if link_p && has("p2") {
            return Err(CliError::usage("'link_p' and 'axis.p2' are exclusive"));
        }
        for a in &axes {
            let bad = match a.name {
                "p1" | "p2" | "w1" => a.values.iter().any(|v| !(0.0..=1.0).contains(v)),
                _ => a.values.iter().any(|v| *v < 0.0),
            };
            if bad {
                return Err(CliError::usage(format!("axis '{}' values out of range", a.name)));
            }
        }
        Ok(Self {
            model,
            w,
            k: kv.get("k")?.unwrap_or(clusters),
            trials,
            seed: kv.get("seed")?.unwrap_or(0),
            mode,
            link_p,
            axes,
        })
    }

    /// Every grid point as one value per axis, last axis fastest.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let mut points = vec![Vec::new()];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.values.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        points
    }

    pub fn header(&self) -> String {
        let mut cols: Vec<&str> = self.axes.iter().map(|a| a.name).collect();
        cols.extend(VALUE_COLUMNS);
        cols.join(",")
    }
}

/// One CSV row's numeric payload; `None` prints as an empty field.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub point: Vec<f64>,
    pub trial: usize,
    pub values: [Option<f64>; 5],
    pub warning: Option<String>,
}

struct Setting {
    model: Model,
    w: LayerWeights,
    tau: Option<f64>,
}

fn setting(spec: &SweepSpec, point: &[f64]) -> Result<Setting, CliError> {
    let mut model = spec.model.clone();
    let mut w = spec.w.clone();
    let mut tau = None;
    for (axis, &v) in spec.axes.iter().zip(point) {
        match axis.name {
            "p1" => {
                model.set_noise_p(0, v)?;
                if spec.link_p && model.layers() > 1 {
                    model.set_noise_p(1, v)?;
                }
            }
            "p2" => model.set_noise_p(1, v)?,
            "w1" => w = LayerWeights::new(vec![v, 1.0 - v])?,
            _ => tau = Some(v),
        }
    }
    if spec.link_p && model.layers() > 1 && !spec.axes.iter().any(|a| a.name == "p1") {
        let p = model.noise_p(0);
        model.set_noise_p(1, p)?;
    }
    Ok(Setting { model, w, tau })
}

fn run_job(spec: &SweepSpec, point: &[f64], trial: usize) -> Result<Row, CliError> {
    let s = setting(spec, point)?;
    let trial_seed = spec.seed ^ trial as u64;
    let (g, truth) = s.model.generate(trial_seed)?;
    let t_true = s.model.noise_levels();
    let mut row = Row {
        point: point.to_vec(),
        trial,
        values: [None; 5],
        warning: None,
    };
    let w = match (spec.mode, s.tau) {
        (Mode::Sgc, Some(tau)) => adapt_weights(&s.w, &t_true, tau),
        _ => s.w.clone(),
    };
    let scored = match spec.mode {
        Mode::Sgc => multilayer_sgc(&g, &w, spec.k, spec.seed).map(|(a, emb)| (a, emb, w.clone())),
        Mode::Mimosa => {
            let cfg = MimosaConfig {
                w_ini: Some(w.clone()),
                tau_set: s.tau.map(|t| vec![t]).unwrap_or_else(|| MimosaConfig::default().tau_set),
                seed: spec.seed,
                ..Default::default()
            };
            match run_mimosa(&g, &cfg) {
                Ok(r) if r.status == MimosaStatus::Found => {
                    let ws = r.w_star.clone().unwrap();
                    let a = r.assignment.clone().unwrap();
                    multilayer_sgc(&g, &ws, r.k.unwrap(), spec.seed).map(|(_, emb)| (a, emb, ws))
                }
                Ok(_) => {
                    row.warning = Some("not applicable".into());
                    row.values[1] = Some(w.dot(&t_true));
                    return Ok(row);
                }
                Err(f) => Err(f.error),
            }
        }
    };
    match scored {
        Ok((a, emb, w_used)) => {
            row.values[0] = Some(detectability(&a, &truth)?);
            row.values[1] = Some(w_used.dot(&t_true));
            row.values[4] = Some(partial_eigenvalue_sum(&emb) / g.n() as f64);
            match critical_bounds(&g, &truth, &w_used) {
                Ok(b) => {
                    row.values[2] = Some(b.t_lb);
                    row.values[3] = Some(b.t_ub);
                }
                Err(e) => row.warning = Some(e.to_string()),
            }
        }
        Err(e) => {
            row.values[1] = Some(w.dot(&t_true));
            row.warning = Some(e.to_string());
        }
    }
    Ok(row)
}

/// Runs every grid point × trial, in parallel, returning rows in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<Row>, CliError> {
    let jobs: Vec<(Vec<f64>, usize)> = spec
        .grid()
        .into_iter()
        .flat_map(|p| (0..spec.trials).map(move |t| (p.clone(), t)))
        .collect();
    jobs.par_iter()
        .map(|(p, t)| run_job(spec, p, *t))
        .collect()
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn mean(values: &[f64], kind: MeanKind) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    Some(match kind {
        MeanKind::Geometric => {
            if values.iter().any(|&v| v <= 0.0) {
                0.0
            } else {
                (values.iter().map(|v| v.ln()).sum::<f64>() / n).exp()
            }
        }
        _ => values.iter().sum::<f64>() / n,
    })
}

/// CSV text: header, one line per row, then mean lines when requested.
/// Means run over trials and over the `w1` axis, grouped by the other axes.
pub fn render_csv(spec: &SweepSpec, rows: &[Row], kind: MeanKind) -> String {
    let mut out = spec.header();
    out.push('\n');
    for r in rows {
        let mut fields: Vec<String> = r.point.iter().map(|v| v.to_string()).collect();
        fields.push(r.trial.to_string());
        fields.extend(r.values.iter().map(|v| fmt_opt(*v)));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    if kind == MeanKind::None {
        return out;
    }
    let w1 = spec.axes.iter().position(|a| a.name == "w1");
    let key = |r: &Row| -> Vec<u64> {
        r.point
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != w1)
            .map(|(_, v)| v.to_bits())
            .collect()
    };
    let mut groups: Vec<(Vec<u64>, Vec<&Row>)> = Vec::new();
    for r in rows {
        let k = key(r);
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, members)) => members.push(r),
            None => groups.push((k, vec![r])),
        }
    }
    for (_, members) in groups {
        let first = members[0];
        let mut fields: Vec<String> = first
            .point
            .iter()
            .enumerate()
            .map(|(i, v)| if Some(i) == w1 { "mean".to_string() } else { v.to_string() })
            .collect();
        fields.push("mean".into());
        for c in 0..5 {
            let vals: Vec<f64> = members.iter().filter_map(|r| r.values[c]).collect();
            fields.push(fmt_opt(mean(&vals, kind)));
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
