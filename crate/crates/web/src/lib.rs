//! Browser bindings for the demo page in `www/`.
//!
//! Every exported function takes and returns JSON text so the page needs no
//! generated type glue. Failures come back as `{"error": "..."}`.

use mapt_core::layers;
use mapt_core::mc::{self, CheckOptions, Query, Strategy};
use mapt_core::model::fixtures;
use mapt_core::semantics::{Bound, Semantics, System};
use mapt_core::Model;
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

const BUDGET: usize = 200_000;

fn respond(result: Result<serde_json::Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn bound(m: &Model, text: &str) -> Result<Bound, String> {
    let specs: Vec<String> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect();
    Bound::parse(m, &specs).map_err(|e| e.to_string())
}

fn load(model_json: &str) -> Result<Model, String> {
    Model::from_json(model_json).map_err(|e| e.to_string())
}

/// Source text of a bundled model.
#[wasm_bindgen]
pub fn fixture(name: &str) -> String {
    fixtures::source(name).map(str::to_string).unwrap_or_default()
}

#[derive(Serialize)]
struct Slot {
    t: u64,
    cut: Option<String>,
}

/// One entry per time `1..=lcm`, with the cut emitted there if any.
pub fn cuts_timeline_json(model_json: &str) -> Result<serde_json::Value, String> {
    let m = load(model_json)?;
    let cuts = layers::find_cuts(&m, false).map_err(|e| e.to_string())?;
    let lcm = m.lcm_periods().map_err(|e| e.to_string())?;
    let selected = layers::select_cut(&m, false).map_err(|e| e.to_string())?;
    let slots: Vec<Slot> = (1..=lcm)
        .map(|t| Slot {
            t,
            cut: cuts
                .iter()
                .find(|c| c.t == t)
                .map(|c| c.display(&m).to_string()),
        })
        .collect();
    Ok(json!({
        "lcm": lcm,
        "slots": slots,
        "selected": selected.map(|c| c.t),
    }))
}

/// Bounded state counts under both semantics.
pub fn compare_semantics_json(model_json: &str, bound_text: &str) -> Result<serde_json::Value, String> {
    let m = load(model_json)?;
    let b = bound(&m, bound_text)?;
    let count = |sem| {
        mc::count_states(&System::new(&m, sem, b.clone()), BUDGET).map_err(|e| e.to_string())
    };
    Ok(json!({
        "original": count(Semantics::Original)?,
        "accelerated": count(Semantics::Accelerated)?,
    }))
}

pub fn check_query_json(
    model_json: &str,
    query: &str,
    bound_text: &str,
    strategy: &str,
) -> Result<serde_json::Value, String> {
    let m = load(model_json)?;
    let sys = System::new(&m, Semantics::Accelerated, bound(&m, bound_text)?);
    let q = Query::parse(&m, query).map_err(|e| e.to_string())?;
    let opts = CheckOptions {
        strategy: strategy.parse::<Strategy>()?,
        budget: BUDGET,
        ..CheckOptions::default()
    };
    let out = mc::check(&sys, &q, &opts).map_err(|e| e.to_string())?;
    Ok(json!({
        "query": q.to_string(),
        "holds": out.holds,
        "stats": out.stats,
    }))
}

#[wasm_bindgen]
pub fn cuts_timeline(model_json: &str) -> String {
    respond(cuts_timeline_json(model_json))
}

#[wasm_bindgen]
pub fn compare_semantics(model_json: &str, bound_text: &str) -> String {
    respond(compare_semantics_json(model_json, bound_text))
}

#[wasm_bindgen]
pub fn check_query(model_json: &str, query: &str, bound_text: &str, strategy: &str) -> String {
    respond(check_query_json(model_json, query, bound_text, strategy))
}
