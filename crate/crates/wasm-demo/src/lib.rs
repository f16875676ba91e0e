//! Browser bindings: simulate and fit a cone, classify a simulated pair, and
//! run the pairwise matrix on a price file.
//!
//! Every export returns a JSON or SVG string. The plain functions are kept
//! separate from the bindings so they can be tested natively.

use extremaldep::classifier::{classify_repeated, ClassifierConfig, TailSize};
use extremaldep::pipeline::heatmap::{render_heatmap, SectorMeta};
use extremaldep::pipeline::matrix::{run_matrix, RunConfig};
use extremaldep::pipeline::prepare_returns;
use extremaldep::pipeline::prices::{read_prices, write_prices};
use extremaldep::polar::{to_polar_sample, PolarObservation};
use extremaldep::stats::fit_cone;
use extremaldep::stream::StreamKey;
use extremaldep::synth::{engineered_panel, gen_class_sample, AngularLaw, ClassSpec};
use extremaldep::tail::{hill_alpha, order_tail};
use extremaldep::threshold::{select_threshold, ThresholdConfig};
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_N: usize = 20_000;

fn spec(class: &str, alpha: f64, p1: f64, p2: f64) -> Result<ClassSpec, String> {
    let spec = match class {
        "full" => ClassSpec::full(alpha, p1),
        "strong" => ClassSpec::strong(alpha, p1, p2),
        "weak" => ClassSpec::weak(alpha),
        "weak-beta" => ClassSpec::Weak { alpha, law: AngularLaw::Beta22 },
        "indep" => ClassSpec::independence(alpha),
        other => return Err(format!("unknown class `{other}`")),
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn sample(class: &str, alpha: f64, n: usize, p1: f64, p2: f64, seed: u64) -> Result<Vec<PolarObservation>, String> {
    if !(20..=MAX_N).contains(&n) {
        return Err(format!("n must be between 20 and {MAX_N}"));
    }
    let obs = gen_class_sample(&spec(class, alpha, p1, p2)?, n, StreamKey::new(seed)).map_err(|e| e.to_string())?;
    Ok(to_polar_sample(&obs).0)
}

/// Sample points, the selected tail and the fitted cone.
pub fn simulate_fit_json(class: &str, alpha: f64, n: usize, p1: f64, p2: f64, seed: u64) -> Result<String, String> {
    let s = sample(class, alpha, n, p1, p2, seed)?;
    let radii: Vec<f64> = s.iter().map(|p| p.r).collect();
    let k = select_threshold(&radii, &ThresholdConfig::default()).map_err(|e| e.to_string())?.k_used;
    let tail = order_tail(&s, k).map_err(|e| e.to_string())?;
    let est = hill_alpha(&tail).map_err(|e| e.to_string())?;
    let fit = fit_cone(&tail, est.inv_alpha_hat, 4.0, 0.01).map_err(|e| e.to_string())?;
    let points: Vec<[f64; 2]> = s.iter().map(|p| [p.r * p.theta, p.r * (1.0 - p.theta)]).collect();
    let tail_points: Vec<[f64; 2]> = tail.points().map(|p| [p.r, p.theta]).collect();
    Ok(json!({
        "points": points,
        "tail": tail_points,
        "k": k,
        "threshold_radius": tail.threshold_radius(),
        "alpha_hat": est.alpha_hat,
        "cone": { "a": fit.cone.a(), "b": fit.cone.b() },
    })
    .to_string())
}

/// Dependence vector of a simulated pair.
pub fn classify_json(
    class: &str,
    alpha: f64,
    n: usize,
    p1: f64,
    p2: f64,
    seed: u64,
    reps: usize,
) -> Result<String, String> {
    let s = sample(class, alpha, n, p1, p2, seed)?;
    let cfg = ClassifierConfig {
        tail_size: TailSize::Rule(ThresholdConfig::default()),
        repetitions: reps.clamp(1, 200),
        seed,
        ..Default::default()
    };
    let c = classify_repeated(&s, &cfg).map_err(|e| e.to_string())?;
    let d = &c.diagnostics;
    Ok(json!({
        "weights": c.vector.map(|v| v.weights),
        "majority": c.vector.map(|v| v.majority().name()),
        "k": d.k_n,
        "m": d.m,
        "k_m": d.k_m,
        "alpha_hat": d.alpha_hat.alpha_hat,
        "cone": { "a": d.cone_fit.cone.a(), "b": d.cone_fit.cone.b() },
    })
    .to_string())
}

/// Long-format prices of six synthetic assets.
pub fn demo_prices_csv(seed: u64) -> Result<String, String> {
    engineered_panel(822, StreamKey::new(seed))
        .map(|p| write_prices(&p))
        .map_err(|e| e.to_string())
}

/// Runs every pair of a price file; returns the heatmap and the flat table.
pub fn matrix_json(prices_csv: &str, seed: u64, reps: usize) -> Result<String, String> {
    let table = read_prices(prices_csv.as_bytes()).map_err(|e| e.to_string())?;
    let returns = prepare_returns(&table, 0).map_err(|e| e.to_string())?;
    let mut cfg = RunConfig::default();
    cfg.classifier.seed = seed;
    cfg.classifier.repetitions = reps.clamp(1, 200);
    let file = run_matrix(&returns, &cfg).map_err(|e| e.to_string())?.to_file();
    let meta: Vec<SectorMeta> = table
        .series
        .iter()
        .map(|s| SectorMeta {
            asset_id: s.asset_id.clone(),
            market: s.market.clone(),
            sector: s.sector.clone(),
        })
        .collect();
    let svg = render_heatmap(&file, &meta).map_err(|e| e.to_string())?;
    Ok(json!({
        "svg": svg,
        "csv": file.to_csv(),
        "dropped_rows": table.dropped_rows,
    })
    .to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = simulateFit)]
pub fn simulate_fit(class: &str, alpha: f64, n: usize, p1: f64, p2: f64, seed: u64) -> Result<String, JsError> {
    js(simulate_fit_json(class, alpha, n, p1, p2, seed))
}

#[wasm_bindgen]
pub fn classify(class: &str, alpha: f64, n: usize, p1: f64, p2: f64, seed: u64, reps: usize) -> Result<String, JsError> {
    js(classify_json(class, alpha, n, p1, p2, seed, reps))
}

#[wasm_bindgen(js_name = demoPrices)]
pub fn demo_prices(seed: u64) -> Result<String, JsError> {
    js(demo_prices_csv(seed))
}

#[wasm_bindgen]
pub fn matrix(prices_csv: &str, seed: u64, reps: usize) -> Result<String, JsError> {
    js(matrix_json(prices_csv, seed, reps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn fit_reports_cone_inside_support() {
        let v: Value = serde_json::from_str(&simulate_fit_json("strong", 1.0, 5000, 0.3, 0.7, 1).unwrap()).unwrap();
        assert_eq!(v["points"].as_array().unwrap().len(), 5000);
        let (a, b) = (v["cone"]["a"].as_f64().unwrap(), v["cone"]["b"].as_f64().unwrap());
        assert!(a >= 0.2 && b <= 0.8 && a <= b, "{a} {b}");
        assert_eq!(v["tail"].as_array().unwrap().len() as u64, v["k"].as_u64().unwrap());
    }

    #[test]
    fn classify_returns_a_vector() {
        let v: Value = serde_json::from_str(&classify_json("full", 1.0, 822, 0.5, 0.0, 2, 10).unwrap()).unwrap();
        let sum: f64 = v["weights"].as_array().unwrap().iter().map(|w| w.as_f64().unwrap()).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert_eq!(v["m"], 42);
    }

    #[test]
    fn bad_inputs_are_errors() {
        assert!(simulate_fit_json("nope", 1.0, 100, 0.5, 0.5, 0).is_err());
        assert!(simulate_fit_json("strong", 1.0, 100, 0.7, 0.3, 0).is_err());
        assert!(simulate_fit_json("full", 1.0, 5, 0.5, 0.5, 0).is_err());
        assert!(matrix_json("not,a,price,file\n", 0, 1).is_err());
    }

    #[test]
    fn demo_matrix_has_fifteen_pairs() {
        let prices = demo_prices_csv(4).unwrap();
        let v: Value = serde_json::from_str(&matrix_json(&prices, 4, 3).unwrap()).unwrap();
        assert_eq!(v["csv"].as_str().unwrap().lines().count(), 16);
        assert!(v["svg"].as_str().unwrap().starts_with("<svg"));
    }
}
