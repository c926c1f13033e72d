//! WebAssembly bindings for the browser page in `www/`.
//!
//! Each export takes and returns JSON strings. Failures come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use dihedral::reduction::{
    build_canonical_chain, build_static_chain, encode_sets, pad_and_scale, run_dynamic_reduction,
    run_static_reduction, SetsFile, ThreeSumInstance,
};
use dihedral::{dyn_rotate, Chain, ChainFile, DihedralQuery};
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

fn parse_chain(text: &str) -> Result<Chain, String> {
    let f: ChainFile = serde_json::from_str(text).map_err(|e| format!("chain JSON: {e}"))?;
    Chain::from_file(f).map_err(|e| e.to_string())
}

fn parse_sets(text: &str) -> Result<ThreeSumInstance, String> {
    let f: SetsFile = serde_json::from_str(text).map_err(|e| format!("sets JSON: {e}"))?;
    f.into_instance().map_err(|e| e.to_string())
}

fn finish(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

/// Rotates the chain about `edge` by `angle` radians if the sweep is
/// collision-free. The returned `chain` is the rotated one, or the input when
/// the rotation is blocked.
pub fn try_query(chain: &str, edge: usize, angle: f64) -> Result<Value, String> {
    let c = parse_chain(chain)?;
    let out = dyn_rotate(&c, &DihedralQuery::new(edge, angle)).map_err(|e| e.to_string())?;
    Ok(json!({
        "feasible": out.applied,
        "pairTests": out.feasibility.pair_tests,
        "witness": out.feasibility.event,
        "chain": out.chain.to_file(),
    }))
}

/// Runs a reduction and returns the transcript.
pub fn try_reduce(sets: &str, mode: &str) -> Result<Value, String> {
    let inst = parse_sets(sets)?;
    let t = match mode {
        "static" => run_static_reduction(&inst),
        "dynamic" => run_dynamic_reduction(&inst, None),
        other => return Err(format!("unknown mode {other:?}")),
    }
    .map_err(|e| e.to_string())?;
    serde_json::to_value(&t).map_err(|e| e.to_string())
}

/// The chain a reduction probes, ready to draw, plus the edges it probes.
/// In dynamic mode this is the canonical chain after the sets are folded in.
pub fn try_construction(sets: &str, mode: &str) -> Result<Value, String> {
    let inst = parse_sets(sets)?;
    let scaled = pad_and_scale(&inst, None).map_err(|e| e.to_string())?;
    let (chain, probes): (Chain, Vec<usize>) = match mode {
        "static" => {
            let s = build_static_chain(&scaled).map_err(|e| e.to_string())?;
            let probes = s.feature_map.iter().map(|(_, e)| e.0).collect();
            (s.chain, probes)
        }
        "dynamic" => {
            let c = build_canonical_chain(scaled.n).map_err(|e| e.to_string())?;
            let (encoded, _) = encode_sets(&c, &scaled, 1).map_err(|e| e.to_string())?;
            (encoded, c.risers[..c.n].iter().map(|r| r.0).collect())
        }
        other => return Err(format!("unknown mode {other:?}")),
    };
    Ok(json!({ "chain": chain.to_file(), "probeEdges": probes }))
}

#[wasm_bindgen]
pub fn query(chain: &str, edge: usize, angle: f64) -> String {
    finish(try_query(chain, edge, angle))
}

#[wasm_bindgen]
pub fn reduce(sets: &str, mode: &str) -> String {
    finish(try_reduce(sets, mode))
}

#[wasm_bindgen]
pub fn construction(sets: &str, mode: &str) -> String {
    finish(try_construction(sets, mode))
}
