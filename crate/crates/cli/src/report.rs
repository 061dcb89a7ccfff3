//! The machine-readable analysis report.

use bellfilter::filtercore::LocalFilter;
use bellfilter::transform::{apply_filter, extractable_concurrence, verify_bell_diagonal};
use bellfilter::wootters::{detect_degenerate, wootters_decomposition};
use bellfilter::{plan, Classification, CompletionChoice, DensityMatrix, Error, Tolerances};
use serde::{Deserialize, Serialize};

use crate::json::{self, Complex, MatrixJson};
use crate::{CliError, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterBlock {
    #[serde(rename = "fA")]
    pub fa: MatrixJson,
    #[serde(rename = "fB")]
    pub fb: MatrixJson,
    pub a: f64,
    pub m: [f64; 3],
    pub b: f64,
    pub n: [f64; 3],
    #[serde(rename = "det_fA")]
    pub det_fa: f64,
    #[serde(rename = "det_fB")]
    pub det_fb: f64,
    pub condition_numbers: [f64; 2],
}

impl FilterBlock {
    pub fn new(lf: &LocalFilter) -> Self {
        FilterBlock {
            fa: json::matrix(&lf.fa),
            fb: json::matrix(&lf.fb),
            a: lf.a,
            m: lf.m,
            b: lf.b,
            n: lf.n,
            det_fa: lf.det_fa,
            det_fb: lf.det_fb,
            condition_numbers: lf.condition_numbers(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellComponentJson {
    pub p: f64,
    pub state: Vec<Complex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellCheck {
    pub bell_diagonal: bool,
    pub marginal_defect: f64,
    pub tr_r_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub kind: String,
    #[serde(default)]
    pub label: Option<String>,
    pub classification: Classification,
    pub rank: usize,
    pub lambdas: [f64; 4],
    pub tr_r: f64,
    pub concurrence_in: f64,
    pub completion: String,
    pub filter: Option<FilterBlock>,
    #[serde(rename = "lambda_min_F")]
    pub lambda_min_f: Option<f64>,
    pub associated_operator: Option<MatrixJson>,
    pub p_f: Option<f64>,
    pub rho_prime: Option<MatrixJson>,
    pub bell_components: Vec<BellComponentJson>,
    pub concurrence_out: Option<f64>,
    pub bell_check: Option<BellCheck>,
    pub warnings: Vec<String>,
    pub tolerances: Tolerances,
}

pub fn completion_name(choice: &CompletionChoice) -> String {
    match choice {
        CompletionChoice::Canonical => "canonical".into(),
        CompletionChoice::Rank2Optimal => "optimal".into(),
        CompletionChoice::Rank2Tau { tau1, tau2 } => {
            format!("tau=({},{}),({},{})", tau1.re, tau1.im, tau2.re, tau2.im)
        }
        CompletionChoice::Rank2Cd { c1, d1, c2, d2 } => format!(
            "cd=({},{}),({},{}),({},{}),({},{})",
            c1.re, c1.im, d1.re, d1.im, c2.re, c2.im, d2.re, d2.im
        ),
    }
}

/// Runs the pipeline and returns the report together with the exit code it
/// maps to (0 regular, 2 separable, 3 `lambda_n = 0`).
pub fn analyze(
    rho: &DensityMatrix,
    label: Option<String>,
    choice: CompletionChoice,
    tol: &Tolerances,
) -> Result<(Report, i32), CliError> {
    let ws = wootters_decomposition(rho, tol)?;
    let classification = detect_degenerate(&ws, tol);
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        kind: "report".into(),
        label,
        classification,
        rank: ws.rank(),
        lambdas: ws.lambdas,
        tr_r: ws.tr_r,
        concurrence_in: ws.concurrence,
        completion: completion_name(&choice),
        filter: None,
        lambda_min_f: None,
        associated_operator: None,
        p_f: None,
        rho_prime: None,
        bell_components: Vec::new(),
        concurrence_out: None,
        bell_check: None,
        warnings: Vec::new(),
        tolerances: *tol,
    };
    if classification == Classification::Separable {
        report
            .warnings
            .push(Error::Separable(ws.concurrence).to_string());
        return Ok((report, 2));
    }

    let p = plan(rho, choice, tol)?;
    report.warnings = p.warnings.clone();
    let (Some(lf), Some(op)) = (&p.filter, &p.operator) else {
        return Ok((report, 3));
    };
    let t = apply_filter(rho, lf, tol)?;
    let verdict = verify_bell_diagonal(&t, tol);
    if !verdict.bell_diagonal {
        return Err(Error::Consistency(format!(
            "filtered state is not Bell diagonal (marginal defect {:.3e}, tr R defect {:.3e})",
            verdict.marginal_defect, verdict.tr_r_defect
        ))
        .into());
    }
    let c_out = extractable_concurrence(&t, &p.wootters, tol)?;

    report.filter = Some(FilterBlock::new(lf));
    report.lambda_min_f = Some(op.lambda_min_f);
    report.associated_operator = Some(json::matrix(&op.f));
    report.p_f = p.p_f;
    report.rho_prime = Some(json::matrix(t.rho_prime.matrix()));
    report.bell_components = t
        .components
        .iter()
        .map(|b| BellComponentJson {
            p: b.p,
            state: json::vector(&b.e),
        })
        .collect();
    report.concurrence_out = Some(c_out);
    report.bell_check = Some(BellCheck {
        bell_diagonal: verdict.bell_diagonal,
        marginal_defect: verdict.marginal_defect,
        tr_r_defect: verdict.tr_r_defect,
    });
    Ok((report, 0))
}
