use std::path::{Path, PathBuf};

use bellfilter::family::{
    family_closed_form, family_rank2, FamilyClosedForm, FamilyParams, Regime,
};
use bellfilter::filtercore::LocalFilter;
use bellfilter::matcore::{herm_eig, CMat2, CMat4};
use bellfilter::transform::{apply_filter, certify_state, verify_bell_diagonal};
use bellfilter::wootters::wootters_decomposition;
use bellfilter::{load_density, CompletionChoice, Error, Tolerances};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::json::{self, MatrixJson};
use crate::report::{analyze, BellCheck, BellComponentJson, Report};
use crate::{exit, CliError, Outcome, SCHEMA_VERSION};

/// `--completion` values: `canonical`, `optimal`, `tau=R`, `hyperbolic=H`.
pub fn parse_completion(s: &str) -> Result<CompletionChoice, String> {
    let num = |v: &str| v.parse::<f64>().map_err(|e| format!("{v}: {e}"));
    match s.split_once('=') {
        None if s == "canonical" => Ok(CompletionChoice::Canonical),
        None if s == "optimal" => Ok(CompletionChoice::Rank2Optimal),
        Some(("tau", v)) => Ok(CompletionChoice::tau_ratio(num(v)?)),
        Some(("hyperbolic", v)) => Ok(CompletionChoice::hyperbolic(num(v)?)),
        _ => Err(format!(
            "unknown completion `{s}` (expected canonical, optimal, tau=R or hyperbolic=H)"
        )),
    }
}

pub fn analyze_file(
    path: &Path,
    choice: CompletionChoice,
    tol: &Tolerances,
) -> Result<Outcome, CliError> {
    let file = json::read_state(path)?;
    let rho = load_density(&file.density()?, tol)?;
    let (report, code) = analyze(&rho, file.label.clone(), choice, tol)?;
    Outcome::new(&report, code)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyParamsJson {
    pub alpha: f64,
    pub beta: f64,
    pub p: [f64; 4],
    pub tau_ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClosedFormJson {
    pub regime: Regime,
    pub theta: f64,
    pub k: f64,
    pub lambdas: [f64; 4],
    pub tr_r: f64,
    pub concurrence: f64,
    #[serde(rename = "F")]
    pub f: MatrixJson,
    #[serde(rename = "fA")]
    pub fa: MatrixJson,
    #[serde(rename = "fB")]
    pub fb: MatrixJson,
    pub p_f: f64,
}

impl ClosedFormJson {
    fn new(cf: &FamilyClosedForm) -> Self {
        ClosedFormJson {
            regime: cf.regime,
            theta: cf.theta,
            k: cf.k,
            lambdas: cf.lambdas,
            tr_r: cf.tr_r,
            concurrence: cf.concurrence,
            f: json::matrix(&cf.f),
            fa: json::matrix(&cf.fa),
            fb: json::matrix(&cf.fb),
            p_f: cf.p_f,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub schema_version: u32,
    pub kind: String,
    pub params: FamilyParamsJson,
    pub closed_form: Option<ClosedFormJson>,
    pub report: Report,
    /// Largest absolute difference between closed form and pipeline over
    /// lambdas, F, the filters and P_f.
    pub max_deviation: Option<f64>,
}

fn max_entry_diff<const N: usize>(
    a: &MatrixJson,
    b: &bellfilter::matcore::CMat<N>,
) -> Result<f64, CliError> {
    Ok(json::parse_matrix::<N>(a, "matrix")?.dist(b))
}

pub fn family(
    alpha: f64,
    p: [f64; 4],
    tau_ratio: Option<f64>,
    tol: &Tolerances,
) -> Result<Outcome, CliError> {
    let fp = FamilyParams::new(alpha, p)?;
    let rank2 = p[2] == 0.0 && p[3] == 0.0;
    if tau_ratio.is_some() && !rank2 {
        return Err(CliError::invalid(
            "--tau-ratio applies only when p3 = p4 = 0",
        ));
    }
    let rho = load_density(&fp.state(), tol)?;
    let (closed, choice) = if rank2 {
        let r = tau_ratio.unwrap_or(1.0);
        (family_rank2(&fp, r), CompletionChoice::tau_ratio(r))
    } else {
        (family_closed_form(&fp), CompletionChoice::Canonical)
    };
    let closed = match closed {
        Ok(cf) => Some(cf),
        Err(Error::LambdaNZero { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let (report, code) = analyze(&rho, None, choice, tol)?;

    let max_deviation = match (&closed, &report.filter) {
        (Some(cf), Some(filter)) => {
            let mut d = 0.0f64;
            for (a, b) in report.lambdas.iter().zip(cf.lambdas) {
                d = d.max((a - b).abs());
            }
            let f = report
                .associated_operator
                .as_ref()
                .expect("filter implies operator");
            d = d.max(max_entry_diff::<4>(f, &cf.f)?);
            d = d.max(max_entry_diff::<2>(&filter.fa, &cf.fa)?);
            d = d.max(max_entry_diff::<2>(&filter.fb, &cf.fb)?);
            d = d.max((report.p_f.unwrap_or(f64::NAN) - cf.p_f).abs());
            Some(d)
        }
        _ => None,
    };
    let doc = FamilyDoc {
        schema_version: SCHEMA_VERSION,
        kind: "family".into(),
        params: FamilyParamsJson {
            alpha: fp.alpha,
            beta: fp.beta,
            p: fp.p,
            tau_ratio,
        },
        closed_form: closed.as_ref().map(ClosedFormJson::new),
        report,
        max_deviation,
    };
    Outcome::new(&doc, code)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransformDoc {
    pub schema_version: u32,
    pub kind: String,
    pub p_f: f64,
    pub rho_prime: MatrixJson,
    pub bell_components: Vec<BellComponentJson>,
    pub concurrence_in: f64,
    pub concurrence_out: f64,
    pub bell_check: BellCheck,
}

fn check_filter(f: &CMat2, name: &str) -> Result<(), CliError> {
    let e = herm_eig(f).map_err(|e| CliError::invalid(format!("{name}: {e}")))?;
    if e.min() < -1e-12 || e.max() > 1.0 + 1e-9 {
        return Err(CliError::invalid(format!(
            "{name} must be positive semidefinite with eigenvalues at most 1 (found {:.6}, {:.6})",
            e.max(),
            e.min()
        )));
    }
    Ok(())
}

pub fn transform(state: &Path, filter: &Path, tol: &Tolerances) -> Result<Outcome, CliError> {
    let file = json::read_state(state)?;
    let rho = load_density(&file.density()?, tol)?;
    let pair = json::read_filter(filter)?;
    let fa: CMat2 = json::parse_matrix(&pair.fa, "fA")?;
    let fb: CMat2 = json::parse_matrix(&pair.fb, "fB")?;
    check_filter(&fa, "fA")?;
    check_filter(&fb, "fB")?;
    let lf = LocalFilter::from_matrices(fa, fb);
    let t = apply_filter(&rho, &lf, tol)?;
    let ws = wootters_decomposition(&rho, tol)?;
    let v = verify_bell_diagonal(&t, tol);
    let doc = TransformDoc {
        schema_version: SCHEMA_VERSION,
        kind: "transform".into(),
        p_f: t.p_f,
        rho_prime: json::matrix(t.rho_prime.matrix()),
        bell_components: t
            .components
            .iter()
            .map(|b| BellComponentJson {
                p: b.p,
                state: json::vector(&b.e),
            })
            .collect(),
        concurrence_in: ws.concurrence,
        concurrence_out: t.c_out,
        bell_check: BellCheck {
            bell_diagonal: v.bell_diagonal,
            marginal_defect: v.marginal_defect,
            tr_r_defect: v.tr_r_defect,
        },
    };
    Outcome::new(&doc, exit::OK)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyDoc {
    pub schema_version: u32,
    pub kind: String,
    pub label: Option<String>,
    pub concurrence: f64,
    pub tr_r: f64,
    pub bell_check: BellCheck,
}

pub fn verify(path: &Path, tol: &Tolerances) -> Result<Outcome, CliError> {
    let file = json::read_state(path)?;
    let rho = load_density(&file.density()?, tol)?;
    let ws = wootters_decomposition(&rho, tol)?;
    let v = certify_state(&rho, tol)?;
    let doc = VerifyDoc {
        schema_version: SCHEMA_VERSION,
        kind: "verify".into(),
        label: file.label,
        concurrence: ws.concurrence,
        tr_r: ws.tr_r,
        bell_check: BellCheck {
            bell_diagonal: v.bell_diagonal,
            marginal_defect: v.marginal_defect,
            tr_r_defect: v.tr_r_defect,
        },
    };
    let code = if v.bell_diagonal {
        exit::OK
    } else {
        exit::NOT_BELL_DIAGONAL
    };
    Outcome::new(&doc, code)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchEntry {
    pub file: String,
    pub exit_code: i32,
    pub report: Option<Report>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PfStats {
    pub count: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BatchSummary {
    pub files: usize,
    pub regular: usize,
    pub separable: usize,
    pub lambda_n_zero: usize,
    pub failed: usize,
    pub p_f: PfStats,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchDoc {
    pub schema_version: u32,
    pub kind: String,
    pub summary: BatchSummary,
    pub results: Vec<BatchEntry>,
}

/// JSON files directly inside `dir`, sorted by file name.
pub fn batch_inputs(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries =
        std::fs::read_dir(dir).map_err(|e| CliError::invalid(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

fn batch_entry(path: &Path, choice: CompletionChoice, tol: &Tolerances) -> BatchEntry {
    let file = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let run = || -> Result<(Report, i32), CliError> {
        let state = json::read_state(path)?;
        let rho = load_density(&state.density()?, tol)?;
        analyze(&rho, state.label.clone(), choice, tol)
    };
    match run() {
        Ok((report, code)) => BatchEntry {
            file,
            exit_code: code,
            report: Some(report),
            error: None,
        },
        Err(e) => BatchEntry {
            file,
            exit_code: e.code,
            report: None,
            error: Some(e.message),
        },
    }
}

pub fn batch(
    dir: &Path,
    jobs: usize,
    choice: CompletionChoice,
    tol: &Tolerances,
) -> Result<Outcome, CliError> {
    let files = batch_inputs(dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError {
            code: exit::INTERNAL,
            message: e.to_string(),
        })?;
    // par_iter().collect() keeps input order regardless of completion order.
    let results: Vec<BatchEntry> = pool.install(|| {
        files
            .par_iter()
            .map(|p| batch_entry(p, choice, tol))
            .collect()
    });

    let mut summary = BatchSummary {
        files: results.len(),
        ..Default::default()
    };
    let mut probs = Vec::new();
    for r in &results {
        match (&r.report, r.exit_code) {
            (Some(_), exit::OK) => summary.regular += 1,
            (Some(_), exit::SEPARABLE) => summary.separable += 1,
            (Some(_), exit::LAMBDA_N_ZERO) => summary.lambda_n_zero += 1,
            _ => summary.failed += 1,
        }
        if let Some(p) = r.report.as_ref().and_then(|r| r.p_f) {
            probs.push(p);
        }
    }
    if !probs.is_empty() {
        summary.p_f = PfStats {
            count: probs.len(),
            min: probs.iter().copied().reduce(f64::min),
            max: probs.iter().copied().reduce(f64::max),
            mean: Some(probs.iter().sum::<f64>() / probs.len() as f64),
        };
    }
    let doc = BatchDoc {
        schema_version: SCHEMA_VERSION,
        kind: "batch".into(),
        summary,
        results,
    };
    Outcome::new(&doc, exit::OK)
}

/// Writes a state file for `matrix`; used by tests and the `family` examples.
pub fn state_file(m: &CMat4, label: Option<String>) -> json::StateFile {
    json::StateFile::new(m, label)
}
