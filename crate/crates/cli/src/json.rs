//! Wire formats: complex numbers as `[re, im]`, matrices as row-major nested
//! arrays.

use std::path::Path;

use bellfilter::matcore::{c, CMat, CVec, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type Complex = [f64; 2];
pub type MatrixJson = Vec<Vec<Complex>>;

pub fn complex(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn vector<const N: usize>(v: &CVec<N>) -> Vec<Complex> {
    v.0.iter().map(|&z| complex(z)).collect()
}

pub fn matrix<const N: usize>(m: &CMat<N>) -> MatrixJson {
    m.0.iter()
        .map(|row| row.iter().map(|&z| complex(z)).collect())
        .collect()
}

pub fn parse_matrix<const N: usize>(m: &MatrixJson, what: &str) -> Result<CMat<N>, CliError> {
    if m.len() != N || m.iter().any(|r| r.len() != N) {
        return Err(CliError::invalid(format!(
            "{what} must be a {N}x{N} array of [re, im] pairs"
        )));
    }
    Ok(CMat(std::array::from_fn(|i| {
        std::array::from_fn(|j| c(m[i][j][0], m[i][j][1]))
    })))
}

/// A state on disk. A report is accepted too: its `rho_prime` is read when
/// `matrix` is absent.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_prime: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl StateFile {
    pub fn new<const N: usize>(m: &CMat<N>, label: Option<String>) -> Self {
        StateFile {
            matrix: Some(matrix(m)),
            rho_prime: None,
            label,
        }
    }

    pub fn density(&self) -> Result<bellfilter::matcore::CMat4, CliError> {
        match (&self.matrix, &self.rho_prime) {
            (Some(m), _) => parse_matrix(m, "matrix"),
            (None, Some(m)) => parse_matrix(m, "rho_prime"),
            (None, None) => Err(CliError::invalid(
                "state file has neither `matrix` nor `rho_prime`",
            )),
        }
    }
}

/// Filter pair on disk, either bare or nested under a report's `filter` key.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FilterPair {
    #[serde(rename = "fA")]
    pub fa: MatrixJson,
    #[serde(rename = "fB")]
    pub fb: MatrixJson,
}

#[derive(Deserialize)]
struct FilterFile {
    #[serde(rename = "fA")]
    fa: Option<MatrixJson>,
    #[serde(rename = "fB")]
    fb: Option<MatrixJson>,
    filter: Option<FilterPair>,
}

pub fn read_filter(path: &Path) -> Result<FilterPair, CliError> {
    let f: FilterFile = read_json(path)?;
    match (f.fa, f.fb, f.filter) {
        (Some(fa), Some(fb), _) => Ok(FilterPair { fa, fb }),
        (_, _, Some(pair)) => Ok(pair),
        _ => Err(CliError::invalid(format!(
            "{}: expected `fA` and `fB`, or a report with a `filter`",
            path.display()
        ))),
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

pub fn read_state(path: &Path) -> Result<StateFile, CliError> {
    read_json(path)
}

/// Pretty printer that keeps arrays of scalars on one line, so a complex
/// number reads `[re, im]` and a matrix row fits on a line.
pub fn to_text(v: &serde_json::Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn is_flat(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Array(items) => items.iter().all(|x| {
            !x.is_object() && !x.is_array()
                || x.as_array()
                    .is_some_and(|a| a.iter().all(|y| !y.is_object() && !y.is_array()))
        }),
        _ => false,
    }
}

fn write_value(v: &serde_json::Value, indent: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if is_flat(v) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(x, indent, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}
