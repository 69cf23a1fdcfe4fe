//! Browser bindings: sphere approximation heatmap, bound curves and the
//! model-triangle calculator.

use wasm_bindgen::prelude::*;

pub mod ops;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Approximation of the stereographic square map with `nodes` Chebyshev
/// nodes per axis. Returns `[max_error, d_00, d_01, …]`, the distances on a
/// `side × side` grid in row-major order (y fastest).
#[wasm_bindgen]
pub fn sphere_errors(nodes: usize, side: usize) -> Result<Vec<f64>, JsError> {
    ops::sphere_errors(nodes, side).map_err(js_err)
}

/// Points of f and f̂ along the segment y = `y`: `[x, f₁, f₂, f₃, f̂₁, f̂₂, f̂₃]`
/// per sample.
#[wasm_bindgen]
pub fn sphere_slice(nodes: usize, y: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    ops::sphere_slice(nodes, y, samples).map_err(js_err)
}

/// `[ε, exact, simplified]` triples for log-spaced ε in [eps_min, eps_max].
#[wasm_bindgen]
pub fn bound_curve(sigma: f64, curvature: f64, eps_min: f64, eps_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    ops::bound_curve(sigma, curvature, eps_min, eps_max, samples).map_err(js_err)
}

/// Third side of the model triangle with sides a, b enclosing angle c.
#[wasm_bindgen]
pub fn triangle_side(a: f64, b: f64, c: f64, curvature: f64) -> Result<f64, JsError> {
    ops::triangle_side(a, b, c, curvature).map_err(js_err)
}

/// `[lower, upper, model_lower]` bounds on the condition number of exp_p.
#[wasm_bindgen]
pub fn condition_bounds(sigma: f64, curvature: f64) -> Result<Vec<f64>, JsError> {
    ops::condition_bounds(sigma, curvature).map_err(js_err)
}
