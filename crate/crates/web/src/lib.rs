//! WebAssembly bindings for the browser demo. Each export returns a JSON
//! string; errors come back as `{"error": "..."}`.

pub mod demo;

use serde::Serialize;
use wasm_bindgen::prelude::*;

fn to_json<T: Serialize, E: std::fmt::Display>(r: Result<T, E>) -> String {
    let v = match r {
        Ok(v) => serde_json::to_value(v).map_err(|e| e.to_string()),
        Err(e) => Err(e.to_string()),
    };
    match v {
        Ok(v) => v.to_string(),
        Err(e) => serde_json::json!({ "error": e }).to_string(),
    }
}

#[wasm_bindgen]
pub fn stabilize(w1: f64, w2: f64, w3: f64, kv: f64, duration: f64) -> String {
    to_json(demo::stabilize([w1, w2, w3], kv, duration))
}

#[wasm_bindgen]
pub fn roll(shape: &str, kp: f64, kd: f64, duration: f64) -> String {
    to_json(demo::roll(shape, kp, kd, duration))
}

#[wasm_bindgen]
pub fn spectrum(r1: f64, r2: f64, r3: f64, w1: f64, w2: f64, w3: f64) -> String {
    to_json(demo::spectrum([r1, r2, r3], [w1, w2, w3]))
}
