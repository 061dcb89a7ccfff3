//! Browser bindings. Every export takes plain numbers or a JSON string and
//! returns a JSON string; failures come back as `{"error": "..."}`.

use bellfilter::family::{family_closed_form, family_rank2, FamilyClosedForm, FamilyParams};
use bellfilter::matcore::{c, CMat, CMat2, CMat4};
use bellfilter::transform::{apply_filter, verify_bell_diagonal};
use bellfilter::{
    load_density, plan, Classification, CompletionChoice, DensityMatrix, Error, Tolerances,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn mat<const N: usize>(m: &CMat<N>) -> Value {
    json!(m
        .0
        .iter()
        .map(|r| r.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn real_diag(m: &CMat2) -> [f64; 2] {
    [m.0[0][0].re, m.0[1][1].re]
}

/// Pipeline summary for a loaded state.
fn summarize(rho: &DensityMatrix, choice: CompletionChoice) -> Result<Value, String> {
    let tol = Tolerances::default();
    let p = match plan(rho, choice, &tol) {
        Ok(p) => p,
        Err(Error::Separable(conc)) => {
            return Ok(json!({ "classification": "separable", "concurrence": conc }))
        }
        Err(e) => return Err(e.to_string()),
    };
    let ws = &p.wootters;
    let mut out = json!({
        "classification": match p.classification {
            Classification::Regular => "regular",
            Classification::LambdaNZero => "lambda_n_zero",
            Classification::Separable => "separable",
        },
        "rank": ws.rank(),
        "lambdas": ws.lambdas,
        "tr_r": ws.tr_r,
        "concurrence": ws.concurrence,
        "warnings": p.warnings,
    });
    let Some(lf) = p.filter.as_ref() else {
        return Ok(out);
    };
    let t = apply_filter(rho, lf, &tol).map_err(|e| e.to_string())?;
    let v = verify_bell_diagonal(&t, &tol);
    out["p_f"] = json!(t.p_f);
    out["fA"] = mat(&lf.fa);
    out["fB"] = mat(&lf.fb);
    out["a"] = json!(lf.a);
    out["m"] = json!(lf.m);
    out["b"] = json!(lf.b);
    out["n"] = json!(lf.n);
    out["rho_prime"] = mat(t.rho_prime.matrix());
    out["bell_weights"] = json!(t.components.iter().map(|b| b.p).collect::<Vec<_>>());
    out["concurrence_out"] = json!(t.c_out);
    out["bell_diagonal"] = json!(v.bell_diagonal);
    Ok(out)
}

fn closed_form_json(cf: &FamilyClosedForm) -> Value {
    json!({
        "regime": cf.regime,
        "theta": cf.theta,
        "k": cf.k,
        "lambdas": cf.lambdas,
        "concurrence": cf.concurrence,
        "tr_r": cf.tr_r,
        "fA": real_diag(&cf.fa),
        "fB": real_diag(&cf.fb),
        "p_f": cf.p_f,
    })
}

pub fn family_value(alpha: f64, p: [f64; 4], tau_ratio: f64) -> Result<Value, String> {
    let fp = FamilyParams::new(alpha, p).map_err(|e| e.to_string())?;
    let rho = load_density(&fp.state(), &Tolerances::default()).map_err(|e| e.to_string())?;
    let rank2 = p[2] == 0.0 && p[3] == 0.0;
    let (choice, cf) = if rank2 {
        (
            CompletionChoice::tau_ratio(tau_ratio),
            family_rank2(&fp, tau_ratio),
        )
    } else {
        (CompletionChoice::Canonical, family_closed_form(&fp))
    };
    let closed = match cf {
        Ok(cf) => closed_form_json(&cf),
        Err(Error::LambdaNZero { .. }) => Value::Null,
        Err(e) => return Err(e.to_string()),
    };
    Ok(json!({
        "alpha": alpha,
        "beta": fp.beta,
        "p": p,
        "closed_form": closed,
        "pipeline": summarize(&rho, choice)?,
    }))
}

/// `matrix` is a 4x4 array of `[re, im]`; it is renormalized to unit trace.
pub fn analyze_value(text: &str) -> Result<Value, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let rows = v.get("matrix").unwrap_or(&v);
    // an entry is either `[re, im]` or a bare real number
    let entry = |i: usize, j: usize| -> Result<bellfilter::matcore::C64, String> {
        let z = &rows[i][j];
        match (z.as_f64(), z[0].as_f64(), z[1].as_f64()) {
            (Some(re), _, _) => Ok(c(re, 0.0)),
            (None, Some(re), Some(im)) => Ok(c(re, im)),
            _ => Err(format!("entry ({i}, {j}) is not a number or [re, im] pair")),
        }
    };
    let mut m = CMat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m.0[i][j] = entry(i, j)?;
        }
    }
    let tr = m.trace().re;
    if tr.is_nan() || tr <= 0.0 {
        return Err("trace must be positive".into());
    }
    let rho =
        load_density(&m.scale_re(1.0 / tr), &Tolerances::default()).map_err(|e| e.to_string())?;
    summarize(&rho, CompletionChoice::Canonical)
}

/// Success probability against `p4` on a log grid from `1e-8` to `p34 / 2`,
/// with `p3 = p34 - p4`.
pub fn pf_curve_value(
    alpha: f64,
    p1: f64,
    p2: f64,
    p34: f64,
    points: usize,
) -> Result<Value, String> {
    let points = points.clamp(2, 400);
    let (lo, hi) = (1e-8f64.ln(), (p34 / 2.0).ln());
    if hi.is_nan() || hi <= lo {
        return Err("p3 + p4 is too small".into());
    }
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let p4 = (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp();
        let fp = FamilyParams::new(alpha, [p1, p2, p34 - p4, p4]).map_err(|e| e.to_string())?;
        let rho = load_density(&fp.state(), &Tolerances::default()).map_err(|e| e.to_string())?;
        let pipeline = plan(&rho, CompletionChoice::Canonical, &Tolerances::default())
            .ok()
            .and_then(|p| p.p_f);
        let closed = family_closed_form(&fp).ok();
        rows.push(json!({
            "p4": p4,
            "p_f": pipeline,
            "closed_form": closed.as_ref().map(|cf| cf.p_f),
            "regime": closed.as_ref().map(|cf| cf.regime),
        }));
    }
    Ok(json!({ "points": rows }))
}

#[wasm_bindgen]
pub fn family(alpha: f64, p1: f64, p2: f64, p3: f64, p4: f64, tau_ratio: f64) -> String {
    respond(family_value(alpha, [p1, p2, p3, p4], tau_ratio))
}

#[wasm_bindgen]
pub fn analyze(matrix_json: &str) -> String {
    respond(analyze_value(matrix_json))
}

#[wasm_bindgen]
pub fn pf_curve(alpha: f64, p1: f64, p2: f64, p34: f64, points: usize) -> String {
    respond(pf_curve_value(alpha, p1, p2, p34, points))
}
