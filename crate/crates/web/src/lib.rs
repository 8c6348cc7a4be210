//! Browser demo: network generation with coloring, a consensus race between
//! D-ADMM and synchronous ADMM, and a rho sweep. Each export returns JSON.
//! The `*_json` functions hold the logic and run natively; the exports only
//! convert errors.

use dadmm::algorithms::{d_admm, zhu_admm, StopRule};
use dadmm::graph::{greedy_color, Graph};
use dadmm::harness::{model_from_name, RHO_GRID};
use dadmm::problems::ConsensusInstance;
use nalgebra::DVector;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const TOLERANCE: f64 = 1e-4;
const MAX_NODES: usize = 500;

#[derive(Serialize)]
pub struct NetworkView {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
    pub colors: Vec<usize>,
    pub num_colors: usize,
}

#[derive(Serialize)]
pub struct Race {
    pub mean: f64,
    pub d_admm: Vec<f64>,
    pub zhu: Vec<f64>,
}

#[derive(Serialize)]
pub struct SweepRow {
    pub rho: f64,
    pub d_admm: Option<usize>,
    pub zhu: Option<usize>,
}

fn build(model: &str, nodes: usize, seed: u64) -> Result<Graph, String> {
    if nodes > MAX_NODES {
        return Err(format!("at most {MAX_NODES} nodes"));
    }
    let model = model_from_name(model, None, None, None).map_err(|e| e.to_string())?;
    model.generate(nodes, seed).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Network with its greedy coloring.
pub fn network_json(model: &str, nodes: usize, seed: u64) -> Result<String, String> {
    let g = build(model, nodes, seed)?;
    let col = greedy_color(&g);
    to_json(&NetworkView {
        nodes: g.node_count(),
        edges: g.edges().to_vec(),
        colors: col.colors().to_vec(),
        num_colors: col.num_colors(),
    })
}

/// Per-step relative errors of D-ADMM and synchronous ADMM on the same
/// consensus instance (problem seed `seed + 1`).
pub fn race_json(model: &str, nodes: usize, seed: u64, rho: f64, max_steps: usize) -> Result<String, String> {
    let g = build(model, nodes, seed)?;
    let col = greedy_color(&g);
    let inst = ConsensusInstance::generate(nodes, seed.wrapping_add(1));
    let probs = inst.nodes();
    let mean = inst.reference();
    let stop = StopRule::new(DVector::from_element(1, mean), 1e-12, max_steps).map_err(|e| e.to_string())?;
    let errors = |t: dadmm::algorithms::RunTrace| t.records.into_iter().map(|(_, e)| e).collect();
    let d = d_admm(&probs, &g, &col, rho, &stop).map_err(|e| e.to_string())?;
    let z = zhu_admm(&probs, &g, rho, &stop).map_err(|e| e.to_string())?;
    to_json(&Race { mean, d_admm: errors(d), zhu: errors(z) })
}

/// Steps to relative error 1e-4 for every rho of the standard grid.
pub fn sweep_json(model: &str, nodes: usize, seed: u64, max_steps: usize) -> Result<String, String> {
    let g = build(model, nodes, seed)?;
    let col = greedy_color(&g);
    let inst = ConsensusInstance::generate(nodes, seed.wrapping_add(1));
    let probs = inst.nodes();
    let stop = StopRule::new(DVector::from_element(1, inst.reference()), TOLERANCE, max_steps)
        .map_err(|e| e.to_string())?;
    let reached = |t: dadmm::algorithms::RunTrace| t.reached_tol().then(|| t.steps());
    let mut rows = Vec::with_capacity(RHO_GRID.len());
    for rho in RHO_GRID {
        let d = d_admm(&probs, &g, &col, rho, &stop).map_err(|e| e.to_string())?;
        let z = zhu_admm(&probs, &g, rho, &stop).map_err(|e| e.to_string())?;
        rows.push(SweepRow { rho, d_admm: reached(d), zhu: reached(z) });
    }
    to_json(&rows)
}

#[wasm_bindgen]
pub fn network(model: &str, nodes: usize, seed: u32) -> Result<String, JsValue> {
    network_json(model, nodes, seed.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn race(model: &str, nodes: usize, seed: u32, rho: f64, max_steps: usize) -> Result<String, JsValue> {
    race_json(model, nodes, seed.into(), rho, max_steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sweep(model: &str, nodes: usize, seed: u32, max_steps: usize) -> Result<String, JsValue> {
    sweep_json(model, nodes, seed.into(), max_steps).map_err(|e| JsValue::from_str(&e))
}
