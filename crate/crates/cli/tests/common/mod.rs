#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use bellfilter::matcore::{c, CMat, CMat4, CVec4};
use bellfilter_cli::json::StateFile;
use serde_json::Value;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("stdout is not JSON ({e}):\n{}", self.stdout))
    }
}

pub fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_bellfilter"))
        .args(args)
        .output()
        .expect("spawn bellfilter");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn write_state(dir: &Path, name: &str, m: &CMat4) -> PathBuf {
    let path = dir.join(name);
    let doc = StateFile::new(m, Some(name.trim_end_matches(".json").to_string()));
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    path
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

pub fn validator() -> jsonschema::JSONSchema {
    let schema: Value = serde_json::from_str(bellfilter_cli::SCHEMA).unwrap();
    jsonschema::JSONSchema::compile(&schema).expect("schema compiles")
}

pub fn assert_valid(v: &jsonschema::JSONSchema, doc: &Value) {
    if let Err(errors) = v.validate(doc) {
        let msgs: Vec<String> = errors
            .map(|e| format!("{} at {}", e, e.instance_path))
            .collect();
        panic!("schema violations:\n{}", msgs.join("\n"));
    }
}

pub fn matrix_of(v: &Value) -> CMat4 {
    CMat(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let z = &v[i][j];
            c(z[0].as_f64().unwrap(), z[1].as_f64().unwrap())
        })
    }))
}

pub fn pure(v: [f64; 4]) -> CMat4 {
    CVec4::from_real(v).projector()
}

/// `w |Psi-><Psi-| + (1 - w) I / 4`
pub fn werner(w: f64) -> CMat4 {
    let s = 0.5f64.sqrt();
    pure([0.0, s, -s, 0.0]).scale_re(w) + CMat4::identity().scale_re((1.0 - w) / 4.0)
}

pub fn max_dev_from_identity(v: &Value) -> f64 {
    let m = matrix_of_2(v);
    let mut worst = 0.0f64;
    for (i, row) in m.iter().enumerate() {
        for (j, &(re, im)) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((re - target).hypot(im));
        }
    }
    worst
}

fn matrix_of_2(v: &Value) -> [[(f64, f64); 2]; 2] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (v[i][j][0].as_f64().unwrap(), v[i][j][1].as_f64().unwrap()))
    })
}
