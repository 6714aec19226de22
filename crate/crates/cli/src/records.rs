//! JSON records emitted by the CLI that are not library types. All reject
//! unknown fields so emitted documents can be re-parsed strictly.

use std::collections::BTreeMap;

use krawtchouk::mvk::BasisRecord;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorRecord {
    pub error: ErrorBody,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    pub status: i32,
}

/// `n` and `x` are numbers for one-dimensional families and arrays for
/// `mvk`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRecord {
    pub family: String,
    pub n: Value,
    pub x: Value,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisOutput {
    pub d: usize,
    pub p: Vec<Value>,
    pub u: Vec<Vec<Value>>,
    pub a: Vec<Value>,
    pub orthonormal: bool,
}

impl BasisOutput {
    /// The spec-file form, readable by `--basis`.
    pub fn record(&self) -> BasisRecord {
        BasisRecord {
            d: self.d,
            p: self.p.clone(),
            u: self.u.clone(),
            a: Some(self.a.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelRecord {
    pub degree: usize,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub value: Value,
}

/// One state pair of a comparison; `values` is keyed by method name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareRow {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub values: BTreeMap<String, f64>,
    pub max_abs_diff: f64,
    /// `(empirical - reference) / sigma` when `empirical` was requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareReport {
    pub t: f64,
    pub methods: Vec<String>,
    pub rows: Vec<CompareRow>,
    /// Largest difference between deterministic methods.
    pub max_abs_diff: f64,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_z: Option<f64>,
    pub passed: bool,
}
