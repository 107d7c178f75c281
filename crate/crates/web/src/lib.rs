//! Browser bindings: counts, structure inspection and melting curves.
//!
//! Each export wraps a plain function returning `Result<String, String>`
//! so the logic can be tested natively.

use serde_json::json;
use wasm_bindgen::prelude::*;

use rnaenum::models::{count_range, Dangles, StructureClass};
use rnaenum::structures::{
    classify, count_dangle_annotations, parse_dot_bracket, parse_rational, to_tree, validate, ModelParams,
    StructureFamily,
};
use rnaenum::thermo::{celsius_grid, compare_models, MeltLevel, GAS_CONSTANT};

/// Largest length the page may request for counts.
pub const MAX_COUNT_LENGTH: usize = 300;
/// Largest length for melting curves.
pub const MAX_MELT_LENGTH: usize = 150;

/// `{"counts": ["1", "1", "2", ...]}` for `n = 1..=n_max`.
pub fn counts_json(family: &str, theta: u32, tau: u32, p: &str, q: &str, n_max: usize) -> Result<String, String> {
    if n_max == 0 || n_max > MAX_COUNT_LENGTH {
        return Err(format!("length must be between 1 and {MAX_COUNT_LENGTH}"));
    }
    let family: StructureFamily = family.parse()?;
    let p = parse_rational(p).map_err(|e| e.to_string())?;
    let q = parse_rational(q).map_err(|e| e.to_string())?;
    let dangles = if q == num_rational::BigRational::from_integer(0.into()) {
        Dangles::None
    } else {
        Dangles::External
    };
    let params = ModelParams::new(theta, tau, p, q).map_err(|e| e.to_string())?;
    let class = StructureClass::new(family, dangles, params).map_err(|e| e.to_string())?;
    let counts = count_range(&class, n_max).map_err(|e| e.to_string())?;
    let counts: Vec<String> = counts[1..].iter().map(|c| c.to_string()).collect();
    Ok(json!({ "class": class.label(), "counts": counts }).to_string())
}

/// Validity, classification, dangle polynomial and dual tree of one
/// dot-bracket structure.
pub fn inspect_json(dot_bracket: &str, theta: u32, tau: u32) -> Result<String, String> {
    let s = parse_dot_bracket(dot_bracket.trim()).map_err(|e| e.to_string())?;
    let params = ModelParams::thresholds(theta, tau);
    let valid = validate(&s, &params);
    let mut v = json!({
        "n": s.len(),
        "valid": valid,
        "links": s.links(),
        "stacked_pairs": s.stacked_pairs(),
        "dangle_polynomial": count_dangle_annotations(&s).coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    });
    if valid {
        let c = classify(&s, &params).map_err(|e| e.to_string())?;
        v["saturated"] = c.is_saturated.into();
        v["g_saturated"] = c.is_g_saturated.into();
        if s.links() > 0 {
            let tree = to_tree(&s).map_err(|e| e.to_string())?;
            v["tree"] = serde_json::to_value(&tree).map_err(|e| e.to_string())?;
        }
    }
    Ok(v.to_string())
}

/// Both melting curves on a Celsius grid, plus their melting temperatures.
pub fn melt_json(n: usize, theta: u32, from: f64, to: f64, step: f64) -> Result<String, String> {
    if n == 0 || n > MAX_MELT_LENGTH {
        return Err(format!("length must be between 1 and {MAX_MELT_LENGTH}"));
    }
    if !(step > 0.0) || to < from || from <= -273.15 || (to - from) / step > 2000.0 {
        return Err("bad temperature range".into());
    }
    let grid = celsius_grid(from, to, step);
    let cmp = compare_models(n, theta, 1.0, GAS_CONSTANT, &grid, MeltLevel::Midpoint).map_err(|e| e.to_string())?;
    Ok(json!({
        "celsius": grid,
        "nussinov": cmp.nussinov.expected,
        "stacking": cmp.stacking.expected,
        "stacking_total": cmp.stacking_total_pairs,
        "tm_nussinov": cmp.nussinov.tm_celsius,
        "tm_stacking": cmp.stacking.tm_celsius,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn counts(family: &str, theta: u32, tau: u32, p: &str, q: &str, n_max: usize) -> Result<String, JsValue> {
    counts_json(family, theta, tau, p, q, n_max).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn inspect(dot_bracket: &str, theta: u32, tau: u32) -> Result<String, JsValue> {
    inspect_json(dot_bracket, theta, tau).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn melt(n: usize, theta: u32, from: f64, to: f64, step: f64) -> Result<String, JsValue> {
    melt_json(n, theta, from, to, step).map_err(|e| JsValue::from_str(&e))
}
