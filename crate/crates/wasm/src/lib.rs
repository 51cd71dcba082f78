//! Browser bindings: three interactive computations returning JSON strings.

use arithdeg::arith::{fmt_rat, to_f64, Rat};
use arithdeg::beta::{beta_autissier_lower, beta_exact_cyclic, beta_numeric_cyclic, f_poly, marked_target, AutissierInput};
use arithdeg::search::{degeneracy_report, search_cor12, SRing, SearchBox, SearchOptions};
use arithdeg::MultiPoly;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest box the page will search.
pub const MAX_BOUND: u64 = 400;

fn err(e: impl std::fmt::Display) -> String {
    json!({ "error": e.to_string() }).to_string()
}

/// Exact and truncated beta for the cyclic configuration, `q` from `3n` to `q_max`.
pub fn cyclic_beta_json(n: u32, q_max: u64, cutoff: u64) -> Result<Value, String> {
    if !(2..=8).contains(&n) {
        return Err("n must be between 2 and 8".into());
    }
    let lo = 3 * n as u64;
    if q_max < lo || q_max > 20 * n as u64 {
        return Err(format!("q_max must lie in {lo}..={}", 20 * n));
    }
    if cutoff == 0 || cutoff > 2000 {
        return Err("cutoff must be between 1 and 2000".into());
    }
    let mut rows = Vec::new();
    for q in lo..=q_max {
        let exact = beta_exact_cyclic(n, q).map_err(|e| e.to_string())?;
        let numeric = beta_numeric_cyclic(n, q, 0, cutoff).map_err(|e| e.to_string())?;
        let f = f_poly(n, q as i64).map_err(|e| e.to_string())?;
        rows.push(json!({
            "q": q,
            "exact": fmt_rat(&exact),
            "exact_f64": to_f64(&exact),
            "numeric_f64": to_f64(&numeric),
            "f": fmt_rat(&f),
            "above_one": exact > Rat::from_integer(1.into()),
        }));
    }
    Ok(json!({ "n": n, "cutoff": cutoff, "rows": rows }))
}

/// Lower bounds against their targets for every hyperplane of the marked configuration.
pub fn marked_bounds_json(n: u32, ell: u64) -> Result<Value, String> {
    if !(2..=6).contains(&n) {
        return Err("n must be between 2 and 6".into());
    }
    if ell == 0 || ell > 1_000_000 {
        return Err("ell must be between 1 and 10^6".into());
    }
    let mut rows = Vec::new();
    for i in 0..n as usize + 2 {
        let input = AutissierInput::marked(n, ell, i).map_err(|e| e.to_string())?;
        let bound = beta_autissier_lower(&input).map_err(|e| e.to_string())?;
        let target = marked_target(n, ell, i);
        rows.push(json!({
            "i": i + 1,
            "bound": fmt_rat(&bound),
            "target": fmt_rat(&target),
            "bound_f64": to_f64(&bound),
            "target_f64": to_f64(&target),
            "exceeds": bound > target,
        }));
    }
    Ok(json!({ "n": n, "ell": ell, "rows": rows }))
}

/// Planar affine search for `x1 x2 (1 - x1 - x2) | g` with the fitted degeneracy summary.
pub fn cor12_search_json(g: &str, bound: u64, primes: &str) -> Result<Value, String> {
    if bound > MAX_BOUND {
        return Err(format!("bound must be at most {MAX_BOUND}"));
    }
    let vars = vec!["x1".to_string(), "x2".to_string()];
    let gp = MultiPoly::parse_with_vars(g, vars.clone()).map_err(|e| e.to_string())?;
    let s = SRing::parse(primes).map_err(|e| e.to_string())?;
    let set = search_cor12(&gp, &SearchBox::new(2, bound, 0), &s, &SearchOptions::default()).map_err(|e| e.to_string())?;
    let points: Vec<Vec<Rat>> = set.records.iter().map(|r| r.point.clone()).collect();
    let rep = degeneracy_report(&points, &vars, false, 3).map_err(|e| e.to_string())?;
    let shown: Vec<Value> = points.iter().map(|p| json!([to_f64(&p[0]), to_f64(&p[1])])).collect();
    Ok(json!({
        "count": points.len(),
        "points": points.iter().map(|p| p.iter().map(fmt_rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "plot": shown,
        "degeneracy": rep,
    }))
}

#[wasm_bindgen]
pub fn cyclic_beta_explorer(n: u32, q_max: u32, cutoff: u32) -> String {
    cyclic_beta_json(n, q_max as u64, cutoff as u64).map_or_else(err, |v| v.to_string())
}

#[wasm_bindgen]
pub fn marked_bounds(n: u32, ell: u32) -> String {
    marked_bounds_json(n, ell as u64).map_or_else(err, |v| v.to_string())
}

#[wasm_bindgen]
pub fn cor12_search(g: &str, bound: u32, primes: &str) -> String {
    cor12_search_json(g, bound as u64, primes).map_or_else(err, |v| v.to_string())
}
