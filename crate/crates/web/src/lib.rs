//! Browser bindings. Every operation has a plain Rust entry point returning
//! JSON (tested natively) and a thin `wasm_bindgen` wrapper.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use lieplateau_core::compound::{self, Topology, Variant};
use lieplateau_core::dla::{lie_closure, DEFAULT_TOL};
use lieplateau_core::ideals::decompose;
use lieplateau_core::io::terms_of;
use lieplateau_core::mixing::mixing_report;
use lieplateau_core::pauli::{PauliTerm, SkewElement};

/// Largest `n` for the compound curves.
pub const MAX_CURVE_N: usize = 40;
/// The projector bound restricts a generator to the middle sector densely.
pub const MAX_PROJECTOR_N: usize = 10;
/// Closure cap for text input; keeps the page responsive.
pub const MAX_DEMO_DIM: usize = 80;
pub const MAX_DECAY_STEPS: usize = 200;

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Parse one Pauli sum per line, e.g. `0.5 XXI + 0.5 YYI` or `-ZI`. A bare
/// label has coefficient 1. `#` starts a comment.
pub fn parse_generators(text: &str) -> Result<Vec<SkewElement>, String> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| format!("line {}: {m}", lineno + 1);
        let mut terms: Vec<(f64, PauliTerm)> = Vec::new();
        let (mut sign, mut coef) = (1.0, None::<f64>);
        for tok in line.split_whitespace() {
            match tok {
                "+" => {}
                "-" => sign = -sign,
                _ => {
                    if let Ok(c) = tok.parse::<f64>() {
                        if coef.is_some() {
                            return Err(err(format!("two coefficients in a row at '{tok}'")));
                        }
                        coef = Some(c);
                        continue;
                    }
                    let (s, label) = match tok.strip_prefix('-') {
                        Some(rest) => (-1.0, rest),
                        None => (1.0, tok),
                    };
                    let p = PauliTerm::parse(label).map_err(|e| err(e.to_string()))?;
                    terms.push((sign * s * coef.unwrap_or(1.0), p));
                    sign = 1.0;
                    coef = None;
                }
            }
        }
        if coef.is_some() {
            return Err(err("coefficient without a label".into()));
        }
        let n = terms[0].1.n_qubits();
        out.push(SkewElement::from_terms(n, terms).map_err(|e| err(e.to_string()))?);
    }
    if out.is_empty() {
        return Err("no generators".into());
    }
    Ok(out)
}

/// Closed-form variances for the compound ansatz across `n = 2..=n_max`.
pub fn compound_curves_json(n_max: usize) -> Result<String, String> {
    if !(2..=MAX_CURVE_N).contains(&n_max) {
        return Err(format!("n_max must be in 2..={MAX_CURVE_N}"));
    }
    let mut rows = Vec::new();
    for n in 2..=n_max {
        let projector = if n % 2 == 0 && n <= MAX_PROJECTOR_N {
            Some(compound::projector_bound(n, &compound::h_y(n, 0, 1).map_err(fail)?).map_err(fail)?)
        } else {
            None
        };
        rows.push(json!({
            "n": n,
            "dla_dim": n * n - 1,
            "k1": compound::predict_basis_state(n, 1).map_err(fail)?,
            "k_half": compound::predict_basis_state(n, n / 2).map_err(fail)?,
            "uniform": compound::predict_uniform(n).map_err(fail)?,
            "projector_bound": projector,
        }));
    }
    Ok(Value::Array(rows).to_string())
}

/// Dimension, simple ideals and center of the algebra generated by `text`.
pub fn algebra_summary_json(text: &str, seed: u64) -> Result<String, String> {
    let gens = parse_generators(text)?;
    let b = lie_closure(&gens, MAX_DEMO_DIM, DEFAULT_TOL).map_err(fail)?;
    let mut out = json!({
        "n_qubits": gens[0].n_qubits(),
        "generators": gens.len(),
        "dim": b.dim(),
        "truncated": b.truncated,
        "closure_log": b.closure_log,
    });
    if !b.truncated {
        let dec = decompose(&b, seed).map_err(fail)?;
        out["center_dim"] = json!(dec.center.ncols());
        out["ideals"] = dec.ideals.iter().map(|i| json!({ "dim": i.dim(), "kappa": i.kappa })).collect();
    }
    Ok(out.to_string())
}

/// Moment-walk mixing curve `eps(L)` for the algebra generated by `text`.
pub fn mixing_decay_json(text: &str, t: usize, steps: usize) -> Result<String, String> {
    if !(1..=MAX_DECAY_STEPS).contains(&steps) {
        return Err(format!("steps must be in 1..={MAX_DECAY_STEPS}"));
    }
    let gens = parse_generators(text)?;
    let b = lie_closure(&gens, MAX_DEMO_DIM, DEFAULT_TOL).map_err(fail)?;
    if b.truncated {
        return Err(format!("closure exceeded {MAX_DEMO_DIM} elements"));
    }
    let r = mixing_report(&b.adjoint_matrices().map_err(fail)?, t, steps).map_err(fail)?;
    serde_json::to_string(&r).map_err(fail)
}

/// Compound generators in the text format, for prefilling the input box.
pub fn compound_generators_text(n: usize, so: bool) -> Result<String, String> {
    let variant = if so { Variant::So } else { Variant::Su };
    let gens = compound::build_generators(n, Topology::Brick, variant).map_err(fail)?;
    let lines: Vec<String> = gens
        .iter()
        .map(|g| terms_of(g).iter().map(|(c, l)| format!("{c} {l}")).collect::<Vec<_>>().join(" + "))
        .collect();
    Ok(lines.join("\n"))
}

fn js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = compoundCurves)]
pub fn compound_curves(n_max: usize) -> Result<String, JsError> {
    js(compound_curves_json(n_max))
}

#[wasm_bindgen(js_name = algebraSummary)]
pub fn algebra_summary(text: &str, seed: u32) -> Result<String, JsError> {
    js(algebra_summary_json(text, seed as u64))
}

#[wasm_bindgen(js_name = mixingDecay)]
pub fn mixing_decay(text: &str, t: usize, steps: usize) -> Result<String, JsError> {
    js(mixing_decay_json(text, t, steps))
}

#[wasm_bindgen(js_name = compoundGenerators)]
pub fn compound_generators(n: usize, so: bool) -> Result<String, JsError> {
    js(compound_generators_text(n, so))
}
