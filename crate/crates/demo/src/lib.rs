//! Browser bindings: Fekete points of a planar set, the log-spectrum of its
//! Landau-level Toeplitz compression, and the `Phi_1` profile.
//!
//! Every export takes and returns JSON text so the page needs no glue
//! beyond `JSON.parse`. The `*_json` functions are plain Rust and carry the
//! logic; the exported wrappers only convert errors.

use serde::Serialize;
use ssflab::asymptotics::{phi1, profile};
use ssflab::capacity::{fekete_points, FeketeConfig};
use ssflab::geometry::PlanarSet;
use ssflab::toeplitz::{spectrum, toeplitz_matrix, QuadConfig};
use wasm_bindgen::prelude::*;

/// Upper limits keeping a click responsive.
pub const MAX_POINTS: usize = 400;
pub const MAX_K: usize = 60;

fn parse_set(shape: &str) -> Result<PlanarSet, String> {
    let set: PlanarSet = serde_json::from_str(shape).map_err(|e| format!("shape JSON, line {} column {}: {e}", e.line(), e.column()))?;
    set.validate().map_err(|e| e.to_string())?;
    Ok(set)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

#[derive(Serialize)]
struct FeketeOut {
    points: Vec<[f64; 2]>,
    diameter: f64,
    energy: f64,
    converged: bool,
}

pub fn fekete_json(shape: &str, n: usize, seed: u64) -> Result<String, String> {
    if !(2..=MAX_POINTS).contains(&n) {
        return Err(format!("n must lie in 2..={MAX_POINTS}"));
    }
    let set = parse_set(shape)?;
    let cfg = FeketeConfig { seed, starts: 1, ..FeketeConfig::default() };
    let r = fekete_points(&set, n, &cfg).map_err(|e| e.to_string())?;
    Ok(to_json(&FeketeOut { points: r.points, diameter: r.diameter, energy: r.energy, converged: r.converged }))
}

#[derive(Serialize)]
struct SpectrumOut {
    log_nu: Vec<f64>,
    certified: Vec<bool>,
    warnings: Vec<String>,
}

pub fn spectrum_json(shape: &str, q: usize, b: f64, k_max: usize) -> Result<String, String> {
    if k_max > MAX_K {
        return Err(format!("K must be at most {MAX_K}"));
    }
    let set = parse_set(shape)?;
    let op = toeplitz_matrix(&set, q, b, k_max, &QuadConfig::default()).map_err(|e| e.to_string())?;
    let seq = spectrum(&op).map_err(|e| e.to_string())?;
    Ok(to_json(&SpectrumOut { log_nu: seq.log_nu, certified: seq.certified, warnings: op.warnings }))
}

#[derive(Serialize)]
struct ProfileOut {
    ln_lambda: Vec<f64>,
    phi0: Vec<f64>,
    phi1: Vec<f64>,
}

/// `count` points with `ln lambda` spaced geometrically between the bounds.
pub fn profile_json(c: f64, ln_from: f64, ln_to: f64, count: usize) -> Result<String, String> {
    if !(ln_from < 0.0 && ln_to < 0.0) || count < 2 {
        return Err("need two negative ln lambda bounds and at least two points".into());
    }
    let (a, b) = ((-ln_from).ln(), (-ln_to).ln());
    let mut out = ProfileOut { ln_lambda: Vec::new(), phi0: Vec::new(), phi1: Vec::new() };
    for i in 0..count {
        let l = -(a + (b - a) * i as f64 / (count - 1) as f64).exp();
        let p = profile(l, true).map_err(|e| e.to_string())?;
        let f = phi1(&p, c).map_err(|e| e.to_string())?;
        out.ln_lambda.push(l);
        out.phi0.push(p.phi0);
        out.phi1.push(f);
    }
    Ok(to_json(&out))
}

#[wasm_bindgen]
pub fn fekete(shape: &str, n: usize, seed: u64) -> Result<String, JsValue> {
    fekete_json(shape, n, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn toeplitz_log_spectrum(shape: &str, q: usize, b: f64, k_max: usize) -> Result<String, JsValue> {
    spectrum_json(shape, q, b, k_max).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn phi_profile(c: f64, ln_from: f64, ln_to: f64, count: usize) -> Result<String, JsValue> {
    profile_json(c, ln_from, ln_to, count).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const DISK: &str = r#"{"type": "disk", "center": [0, 0], "radius": 1}"#;

    #[test]
    fn fekete_on_disk() {
        let v: Value = serde_json::from_str(&fekete_json(DISK, 40, 1).unwrap()).unwrap();
        assert_eq!(v["points"].as_array().unwrap().len(), 40);
        let d = v["diameter"].as_f64().unwrap();
        assert!(d > 1.0 && d < 1.2, "{d}");
    }

    #[test]
    fn spectrum_of_disk_starts_at_one_minus_inverse_e() {
        let v: Value = serde_json::from_str(&spectrum_json(DISK, 0, 2.0, 20).unwrap()).unwrap();
        let l0 = v["log_nu"][0].as_f64().unwrap();
        assert!((l0 - (1.0 - (-1f64).exp()).ln()).abs() < 1e-10);
    }

    #[test]
    fn profile_and_errors() {
        let v: Value = serde_json::from_str(&profile_json(1.0, -1e2, -1e6, 5).unwrap()).unwrap();
        assert_eq!(v["phi1"].as_array().unwrap().len(), 5);
        assert!(profile_json(1.0, -2.0, -1e3, 5).is_err());
        assert!(fekete_json("{", 10, 1).unwrap_err().contains("line 1"));
        assert!(spectrum_json(DISK, 0, 2.0, 500).is_err());
    }
}
