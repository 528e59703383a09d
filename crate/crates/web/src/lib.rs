//! wasm bindings for the demo page in `www/`. Every entry point takes plain
//! strings and returns a JSON string; the `*_json` functions are the same
//! operations without the JS boundary.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use relcris::bpair::{classify, vcris_rank};
use relcris::doc::{classification_to_json, rank_json};
use relcris::filmod::{newton_slopes_point, FilStep, FilteredModule};
use relcris::profile::{PrecisionProfile, Profile};
use relcris::ring::Rational;
use relcris::series::{R0Series, RSeries, Series};

fn profile(p: u32) -> Result<Profile, String> {
    PrecisionProfile::new(p as u64).with_truncation(12, 12, 12, 12).build().map_err(|e| e.to_string())
}

/// Comma- or space-separated integers, lowest degree first.
fn ints(s: &str) -> Result<Vec<i64>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| format!("not an integer: {t:?}")))
        .collect()
}

fn r_series(pr: &Profile, c: &[i64]) -> RSeries {
    let k = pr.k();
    Series::from_coeffs(&k.zero(), c.iter().map(|&x| k.from_int(x)).collect(), pr.my())
}

fn r0_series(pr: &Profile, c: &[i64]) -> R0Series {
    let k0 = pr.k0();
    Series::from_coeffs(&k0.zero(), c.iter().map(|&x| k0.from_int(x)).collect(), pr.my())
}

fn frac(r: &Rational) -> Value {
    json!([r.numer(), r.denom()])
}

/// Slopes and lower-hull vertices of the Newton polygon of an integer
/// matrix given row by row, rows separated by `;`.
pub fn newton_json(p: u32, matrix: &str) -> Result<Value, String> {
    let pr = profile(p)?;
    let rows: Vec<Vec<i64>> = matrix.split(';').map(ints).collect::<Result<_, _>>()?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err("the matrix must be square".into());
    }
    let k0 = pr.k0();
    let m = rows.iter().map(|r| r.iter().map(|&x| k0.from_int(x)).collect()).collect();
    let slopes = newton_slopes_point(&m, 1).map_err(|e| e.to_string())?;
    let mut vertices = vec![json!([0, [0, 1]])];
    let mut y = Rational::from(0);
    for (i, s) in slopes.iter().enumerate() {
        y += s;
        if slopes.get(i + 1) != Some(s) {
            vertices.push(json!([i + 1, frac(&y)]));
        }
    }
    Ok(json!({
        "slopes": slopes.iter().map(frac).collect::<Vec<_>>(),
        "vertices": vertices,
        "newton_number": frac(&y),
    }))
}

/// Rank of V_cris for `Φ = diag(p, 1)` and `Fil¹` spanned by `f e₁ + g e₂`.
pub fn rank_demo_json(p: u32, f: &str, g: &str) -> Result<Value, String> {
    let pr = profile(p)?;
    let (f, g) = (r_series(&pr, &ints(f)?), r_series(&pr, &ints(g)?));
    let v = vcris_rank(&pr, &f, &g).map_err(|e| e.to_string())?;
    Ok(rank_json(&v))
}

/// Classification of the same family.
pub fn classify_demo_json(p: u32, f: &str, g: &str) -> Result<Value, String> {
    let pr = profile(p)?;
    let (f, g) = (r_series(&pr, &ints(f)?), r_series(&pr, &ints(g)?));
    let z = r0_series(&pr, &[]);
    let phi = vec![vec![r0_series(&pr, &[p as i64]), z.clone()], vec![z.clone(), r0_series(&pr, &[1])]];
    let n = vec![vec![z; 2]; 2];
    let d = FilteredModule::new(&pr, phi, n, vec![FilStep { weight: 1, generators: vec![vec![f], vec![g]] }])
        .map_err(|e| e.to_string())?;
    let c = classify(&d).map_err(|e| e.to_string())?;
    Ok(classification_to_json(&c))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn newton_polygon(p: u32, matrix: &str) -> Result<String, JsError> {
    to_js(newton_json(p, matrix))
}

#[wasm_bindgen]
pub fn vcris_rank_demo(p: u32, f: &str, g: &str) -> Result<String, JsError> {
    to_js(rank_demo_json(p, f, g))
}

#[wasm_bindgen]
pub fn classify_demo(p: u32, f: &str, g: &str) -> Result<String, JsError> {
    to_js(classify_demo_json(p, f, g))
}
