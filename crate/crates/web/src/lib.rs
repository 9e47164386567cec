//! Three operations exposed to the browser page in `www/`. The `*_impl`
//! functions carry the logic so they can be tested natively.

use serde_json::json;
use thhforge_core::adams::{chart, run_ss, schedule_for, Target};
use thhforge_core::bokstedt::{thh_homology, SpectrumId};
use thhforge_core::steenrod::{total_rank, SteenrodElement, SubalgebraSpec};
use wasm_bindgen::prelude::*;

/// Keeps the demo responsive; the CLI goes further.
pub const MAX_DEGREE: u32 = 60;

fn bounded(maxdeg: u32) -> Result<u32, String> {
    if maxdeg > MAX_DEGREE {
        Err(format!("the browser demo stops at degree {MAX_DEGREE}"))
    } else {
        Ok(maxdeg)
    }
}

pub fn steenrod_impl(subalgebra: &str, expr: &str) -> Result<String, String> {
    let spec: SubalgebraSpec = subalgebra.parse().map_err(|e| format!("{e}"))?;
    let rank = total_rank(&spec).map_err(|e| e.to_string())?;
    let reduced = if expr.trim().is_empty() {
        None
    } else {
        Some(SteenrodElement::parse(expr).map_err(|e| e.to_string())?.to_string())
    };
    Ok(json!({ "subalgebra": subalgebra, "rank": rank, "reduced": reduced }).to_string())
}

pub fn bokstedt_impl(spectrum: &str, p: u32, maxdeg: u32) -> Result<String, String> {
    let id: SpectrumId = spectrum.parse().map_err(|e| format!("{e}"))?;
    let r = thh_homology(id, p, bounded(maxdeg)?).map_err(|e| e.to_string())?;
    let generators: Vec<_> = r
        .abutment
        .generators
        .iter()
        .map(|g| json!({ "name": g.name, "degree": g.degree, "kind": g.kind, "filtration": g.filtration }))
        .collect();
    Ok(json!({
        "spectrum": r.spectrum,
        "p": r.p,
        "series": r.abutment.series,
        "generators": generators,
        "coaction": r.abutment.coaction,
        "matches_target": r.matches_target,
    })
    .to_string())
}

pub fn adams_impl(target: &str, maxdeg: u32) -> Result<String, String> {
    let target: Target = target.parse().map_err(|e| format!("{e}"))?;
    let n = bounded(maxdeg)?;
    let sched = schedule_for(target, n).map_err(|e| e.to_string())?;
    let run = run_ss(&sched, n).map_err(|e| e.to_string())?;
    Ok(chart::svg_chart(&run.einf, n))
}

/// Rank of a finite subalgebra (`A1`, `A2`, `E`) and the admissible form of
/// an optional Steenrod expression, as JSON.
#[wasm_bindgen]
pub fn steenrod(subalgebra: &str, expr: &str) -> Result<String, JsValue> {
    steenrod_impl(subalgebra, expr).map_err(|e| JsValue::from_str(&e))
}

/// Poincaré series and generators of `H_*(THH(R))`, as JSON.
#[wasm_bindgen]
pub fn bokstedt(spectrum: &str, p: u32, maxdeg: u32) -> Result<String, JsValue> {
    bokstedt_impl(spectrum, p, maxdeg).map_err(|e| JsValue::from_str(&e))
}

/// `E∞` chart of the Adams spectral sequence, as SVG.
#[wasm_bindgen]
pub fn adams_chart(target: &str, maxdeg: u32) -> Result<String, JsValue> {
    adams_impl(target, maxdeg).map_err(|e| JsValue::from_str(&e))
}
