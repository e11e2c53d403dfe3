use multisgc::mimosa::{adapt_weights, parse_result, serialize_result, StepOutcome, TraceEntry};
use multisgc::synth::{detectability, generate_rim, NoiseSpec, RimParams, WeightDistribution, WithinSpec};
use multisgc::{run_mimosa, LayerWeights, MimosaConfig, MimosaResult, MimosaStatus, MultilayerGraph};
use proptest::prelude::*;

fn rim(sizes: Vec<usize>, within: Vec<Vec<f64>>, noise: Vec<(f64, f64)>, seed: u64) -> RimParams {
    RimParams {
        layers: within.len(),
        within: WithinSpec::ErdosRenyi(within),
        noise: NoiseSpec::Identical(noise),
        weights: WeightDistribution::Constant,
        cluster_sizes: sizes,
        seed,
    }
}

fn entries(r: &MimosaResult) -> Vec<&TraceEntry> {
    r.trace.iter().flat_map(|s| &s.entries).collect()
}

/// Re-derives the reliability verdict from the numbers recorded in a trace entry.
fn recheck(e: &TraceEntry) -> bool {
    match e.outcome {
        StepOutcome::IdenticalNoise => {
            assert!(e.glrt.iter().all(|g| g.accept) && e.anscombe.is_empty());
            e.t_w.unwrap() < e.t_lb_hat.unwrap()
        }
        StepOutcome::NonIdenticalNoise => {
            assert!(e.glrt.iter().any(|g| !g.accept));
            e.anscombe.iter().all(|a| a.accept) && e.t_max_w.unwrap() < e.t_lb_hat.unwrap()
        }
        _ => false,
    }
}

fn check_invariants(g: &MultilayerGraph, cfg: &MimosaConfig, r: &MimosaResult) {
    let flat = entries(r);
    for e in &flat {
        assert_eq!(e.reliable, recheck(e), "{e:?}");
    }
    for rel in &r.reliable_set {
        let e = flat[rel.trace_index];
        assert!(e.reliable);
        assert_eq!((e.k, e.tau), (rel.k, rel.tau));
    }
    let max_k = cfg.max_k.unwrap_or(g.n() / 2).min(g.n() - 1);
    let taus = cfg.tau_set.len();
    let cap = if cfg.tau_set.contains(&0.0) { taus } else { taus + 1 };
    assert!(r.sgc_invocations <= (max_k - 1) * cap);
    match r.status {
        MimosaStatus::Found => {
            let best = r.snr.unwrap();
            assert!(r.reliable_set.iter().all(|e| e.snr <= best));
            let k = r.k.unwrap();
            assert!(r.reliable_set.iter().all(|e| e.k == k));
            // reliable entries appear only at the last K examined
            assert_eq!(r.trace.last().unwrap().k, k);
        }
        MimosaStatus::NotApplicable => assert!(r.reliable_set.is_empty()),
    }
}

#[test]
fn clean_layer_wins_over_noise_layer() {
    // layer 0 carries the clusters; layer 1 is a single dense random graph
    let params = rim(vec![50, 40], vec![vec![0.5; 2], vec![0.3; 2]], vec![(0.01, 1.0), (0.3, 1.0)], 7);
    let (g, truth) = generate_rim(&params).unwrap();
    let cfg = MimosaConfig { seed: 1, ..Default::default() };
    let r = run_mimosa(&g, &cfg).unwrap();
    check_invariants(&g, &cfg, &r);
    assert_eq!(r.status, MimosaStatus::Found);
    assert_eq!(r.k, Some(2));
    let w = r.w_star.as_ref().unwrap();
    assert!(w.as_slice()[0] > 0.5, "{:?}", w);
    assert!(detectability(r.assignment.as_ref().unwrap(), &truth).unwrap() > 0.95);
}

#[test]
fn runs_are_reproducible_and_round_trip() {
    let params = rim(vec![30, 30, 30], vec![vec![0.6; 3], vec![0.5; 3]], vec![(0.03, 1.0), (0.05, 2.0)], 11);
    let (g, _) = generate_rim(&params).unwrap();
    let cfg = MimosaConfig { seed: 5, ..Default::default() };
    let a = run_mimosa(&g, &cfg).unwrap();
    let b = run_mimosa(&g, &cfg).unwrap();
    let text = serialize_result(&a, g.node_ids());
    assert_eq!(text, serialize_result(&b, g.node_ids()));
    let back = parse_result(&text, g.node_ids()).unwrap();
    assert_eq!(serialize_result(&back, g.node_ids()), text);
    check_invariants(&g, &cfg, &a);
}

#[test]
fn pure_noise_is_not_applicable() {
    let params = rim(vec![50], vec![vec![0.3], vec![0.2]], vec![(0.0, 1.0), (0.0, 1.0)], 2);
    let (g, _) = generate_rim(&params).unwrap();
    let cfg = MimosaConfig { max_k: Some(6), ..Default::default() };
    let r = run_mimosa(&g, &cfg).unwrap();
    check_invariants(&g, &cfg, &r);
    assert_eq!(r.status, MimosaStatus::NotApplicable);
    let text = serialize_result(&r, g.node_ids());
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["status"], "not_applicable");
    assert!(doc.get("labels").is_none() && doc.get("w_star").is_none());
}

#[test]
fn disconnected_aggregate_is_flagged() {
    // no between-cluster edges at all: every cluster is its own component
    let params = rim(vec![20, 20, 20], vec![vec![0.7; 3]], vec![(0.0, 1.0)], 4);
    let (g, _) = generate_rim(&params).unwrap();
    let cfg = MimosaConfig { max_k: Some(4), ..Default::default() };
    let r = run_mimosa(&g, &cfg).unwrap();
    assert!(!r.warnings.is_empty());
    assert!(r.trace.iter().any(|s| s.components.is_some()));
}

proptest! {
    #[test]
    fn adapted_weights_stay_on_simplex(
        raw in prop::collection::vec(0.01f64..1.0, 1..5),
        t in prop::collection::vec(0.0f64..2.0, 5),
        tau in prop::sample::select(vec![0.0, 0.1, 1.0, 10.0, 1e3, 1e5]),
    ) {
        let w = LayerWeights::new(raw.clone()).unwrap();
        let a = adapt_weights(&w, &t[..raw.len()], tau);
        prop_assert!((a.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(a.as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
        if tau == 0.0 {
            prop_assert!(a.as_slice().iter().zip(w.as_slice()).all(|(x, y)| (x - y).abs() < 1e-15));
        }
        // noisier layers never gain weight relative to cleaner ones
        for i in 0..raw.len() {
            for j in 0..raw.len() {
                if t[i] > t[j] {
                    prop_assert!(a.as_slice()[i] / w.as_slice()[i] <= a.as_slice()[j] / w.as_slice()[j] + 1e-12);
                }
            }
        }
    }
}
