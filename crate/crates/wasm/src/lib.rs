//! Browser bindings for the interactive demo page. Every export takes plain
//! numbers and strings and returns a JSON string, so the generated JS glue
//! stays free of DOM types and the same functions are testable natively.

use eigenfiber::catalog::{example_spec, make_spec, random_valid_params};
use eigenfiber::fiber::{constructive_zero, fiber_walk};
use eigenfiber::matrix::{vector_to_strings, Complex64};
use eigenfiber::spaces::{build_descriptor, Family, SpaceId};
use eigenfiber::verify::{
    duality_sweep, eigen_sweep, find_level_point, mean_curvature_at_level, mean_curvature_estimate,
    sl3_canonical,
};
use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

fn err_json(e: impl std::fmt::Display) -> String {
    json!({ "error": e.to_string() }).to_string()
}

/// The eight supported spaces with their dimensions at small n.
#[wasm_bindgen]
pub fn list_spaces() -> String {
    let mut rows = Vec::new();
    for family in Family::ALL {
        let n = family.min_n();
        let d = build_descriptor(SpaceId::new(family, n).expect("minimal n")).expect("descriptor");
        rows.push(json!({
            "family": family.token(),
            "min_n": family.min_n(),
            "ambient": d.ambient_size,
            "dim_k": d.dim_k(),
            "dim_p": d.dim_p(),
            "compact_dual": family.is_compact(),
            "two_parameter": matches!(family.noncompact_sibling(), Family::SostarU | Family::SustarSp),
        }));
    }
    json!(rows).to_string()
}

/// Random valid parameters, an eigen sweep on the non-compact space and a
/// duality sweep on the compact dual, reported as one JSON object.
#[wasm_bindgen]
pub fn run_eigen_sweep(family: &str, n: u32, points: u32, seed: u32) -> String {
    let inner = || -> eigenfiber::Result<String> {
        let family = Family::parse_token(family)?;
        let (a, b) = random_valid_params(family, n as usize, seed as u64)?;
        let spec = make_spec(family, n as usize, a, b)?;
        let eigen = eigen_sweep(&spec, points as usize, seed as u64)?;
        let dual = duality_sweep(&spec, points as usize, seed as u64)?;
        Ok(json!({
            "space": spec.space.to_string(),
            "params": {
                "a": vector_to_strings(&spec.a),
                "b": spec.b.as_ref().map(vector_to_strings),
            },
            "points": eigen.points,
            "lambda_candidates": spec.lambda_candidates,
            "expected_mu": spec.expected_mu,
            "fitted_lambda": eigen.fitted_lambda,
            "fitted_mu": eigen.fitted_mu,
            "lambda_resolved": eigen.lambda_resolved,
            "max_tau_residual": eigen.max_tau_residual,
            "max_kappa_residual": eigen.max_kappa_residual,
            "dual_space": dual.space.to_string(),
            "dual_lambda": dual.fitted_lambda,
            "dual_mu": dual.fitted_mu,
            "dual_max_tau_residual": dual.max_tau_residual,
            "pass": eigen.max_tau_residual <= 1e-8
                && eigen.max_kappa_residual <= 1e-8
                && (dual.fitted_lambda + eigen.lambda_resolved).abs() <= 1e-7
                && (dual.fitted_mu + spec.expected_mu).abs() <= 1e-7,
        })
        .to_string())
    };
    inner().unwrap_or_else(err_json)
}

/// Walk the a = (1, i, 0) fiber of SL(3,R)/SO(3) and return the samples in
/// the (u, v, w) chart together with their certificates.
#[wasm_bindgen]
pub fn run_fiber_walk_sl3(steps: u32, step_size: f64, seed: u32) -> String {
    let inner = || -> eigenfiber::Result<String> {
        let spec = example_spec(Family::SlrSo)?;
        let d = build_descriptor(spec.space)?;
        let start = constructive_zero(&spec, &d)?;
        let walk = fiber_walk(&spec, &d, &start, steps as usize, step_size, seed as u64)?;
        let mut samples = vec![start];
        samples.extend(walk);
        let mut chart = Vec::with_capacity(samples.len());
        let mut max_phi = 0.0_f64;
        let mut max_membership = 0.0_f64;
        let mut min_margin = f64::INFINITY;
        for fp in &samples {
            let (u, v, w) = sl3_canonical(&fp.point)?;
            chart.push(json!([u, v, w]));
            max_phi = max_phi.max(fp.phi_abs);
            max_membership = max_membership.max(fp.point.membership_residual);
            min_margin = min_margin.min(fp.regularity_margin);
        }
        Ok(json!({
            "space": spec.space.to_string(),
            "points": chart,
            "max_phi_abs": max_phi,
            "max_membership_residual": max_membership,
            "min_regularity_margin": min_margin,
        })
        .to_string())
    };
    inner().unwrap_or_else(err_json)
}

/// Mean-curvature convergence table ||H|| over h, h/2, h/4 at a point of the
/// given level set (level 0 = the zero fiber, anything else is a negative
/// control that should stay far from zero).
#[wasm_bindgen]
pub fn run_curvature_probe(family: &str, n: u32, h0: f64, level: f64, seed: u32) -> String {
    let inner = || -> eigenfiber::Result<String> {
        let family = Family::parse_token(family)?;
        let (a, b) = random_valid_params(family, n as usize, seed as u64)?;
        let spec = make_spec(family, n as usize, a, b)?;
        let d = build_descriptor(spec.space)?;
        let start = constructive_zero(&spec, &d)?;
        let hs = [h0, h0 / 2.0, h0 / 4.0];
        let values: eigenfiber::Result<Vec<f64>> = if level == 0.0 {
            hs.iter()
                .map(|h| mean_curvature_estimate(&spec, &d, &start, *h))
                .collect()
        } else {
            let lv = Complex64::new(level, 0.0);
            let anchor = find_level_point(&spec, &d, &start.point.matrix, lv)?;
            hs.iter()
                .map(|h| mean_curvature_at_level(&spec, &d, &anchor.matrix, *h, lv))
                .collect()
        };
        let values = values?;
        let minimal = values[2] <= 5e-3;
        Ok(json!({
            "space": spec.space.to_string(),
            "level": level,
            "h": hs,
            "mean_curvature": values,
            "minimal": minimal,
        })
        .to_string())
    };
    inner().unwrap_or_else(err_json)
}
