//! JSON records for process specifications and results.
//!
//! Scalars are written as `"a/b"` strings on the exact backend and as plain
//! numbers on the float backend; both are accepted on input. Unknown fields
//! are rejected everywhere.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::composition::{CompositionProcess, UrnSpec};
use crate::error::{Error, Result};
use crate::mvk::{Basis, BasisRecord};
use crate::scalar::{from_json_value, Scalar};
use crate::spectral::{BirthDeathSpec, TruncationControl};

/// Spectral levels kept for infinite spectra when the spec does not say.
pub const DEFAULT_LEVELS: usize = 40;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_terms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_nodes: Option<usize>,
    /// Occupied-state bound for compositions over infinite bases.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<usize>,
    /// State-space bound of the uniformization oracle for infinite bases.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
}

impl TruncationRecord {
    pub fn control(&self, default_tol: f64) -> TruncationControl {
        let d = TruncationControl::default();
        TruncationControl {
            tol: self.tol.unwrap_or(default_tol),
            max_terms: self.max_terms.unwrap_or(d.max_terms),
            quadrature_nodes: self.quadrature_nodes.unwrap_or(d.quadrature_nodes),
            ..d
        }
    }

    pub fn levels(&self) -> usize {
        self.levels.unwrap_or(DEFAULT_LEVELS)
    }
}

/// `{family, params, truncation}`. Families and their parameters:
/// `mm-infinity {lambda, mu}`, `linear {lambda, mu, beta}`,
/// `two-urn {a, b, N}`, `ehrenfest {N, p}`, `custom {birth, death}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSpecRecord {
    pub family: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub truncation: TruncationRecord,
}

fn spec_err(msg: impl Into<String>) -> Error {
    Error::Spec(msg.into())
}

struct Params<'a> {
    family: &'a str,
    map: &'a Map<String, Value>,
}

impl Params<'_> {
    fn expect(&self, keys: &[&str]) -> Result<()> {
        if let Some(k) = self.map.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(spec_err(format!(
                "unknown parameter {k:?} for family {} (expected {keys:?})",
                self.family
            )));
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Result<&Value> {
        self.map
            .get(key)
            .ok_or_else(|| spec_err(format!("family {} needs parameter {key:?}", self.family)))
    }

    fn scalar<T: Scalar>(&self, key: &str) -> Result<T> {
        from_json_value(self.get(key)?).map_err(|e| spec_err(format!("{key}: {e}")))
    }

    fn count(&self, key: &str) -> Result<usize> {
        self.get(key)?
            .as_u64()
            .map(|v| v as usize)
            .ok_or_else(|| spec_err(format!("{key} must be a non-negative integer")))
    }

    fn list<T: Scalar>(&self, key: &str) -> Result<Vec<T>> {
        self.get(key)?
            .as_array()
            .ok_or_else(|| spec_err(format!("{key} must be an array")))?
            .iter()
            .map(|v| from_json_value(v).map_err(|e| spec_err(format!("{key}: {e}"))))
            .collect()
    }
}

impl ProcessSpecRecord {
    pub fn build<T: Scalar>(&self) -> Result<BirthDeathSpec<T>> {
        let p = Params {
            family: &self.family,
            map: &self.params,
        };
        let spec = match self.family.as_str() {
            "mm-infinity" => {
                p.expect(&["lambda", "mu"])?;
                BirthDeathSpec::mm_infinity(p.scalar("lambda")?, p.scalar("mu")?)
            }
            "linear" => {
                p.expect(&["lambda", "mu", "beta"])?;
                BirthDeathSpec::linear(p.scalar("lambda")?, p.scalar("mu")?, p.scalar("beta")?)
            }
            "two-urn" => {
                p.expect(&["a", "b", "N"])?;
                BirthDeathSpec::two_urn(p.count("a")?, p.count("b")?, p.count("N")?)
            }
            "ehrenfest" => {
                p.expect(&["N", "p"])?;
                BirthDeathSpec::ehrenfest(p.count("N")?, p.scalar("p")?)
            }
            "custom" => {
                p.expect(&["birth", "death"])?;
                BirthDeathSpec::custom(p.list("birth")?, p.list("death")?)
            }
            other => return Err(spec_err(format!("unknown family {other:?}"))),
        };
        spec.map_err(|e| spec_err(e.to_string()))
    }
}

/// `{base, N, truncation}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositionSpecRecord {
    pub base: ProcessSpecRecord,
    #[serde(rename = "N")]
    pub particles: usize,
    #[serde(default)]
    pub truncation: TruncationRecord,
}

impl CompositionSpecRecord {
    /// Truncation fields given at the top level override the base's.
    pub fn truncation(&self) -> TruncationRecord {
        let (a, b) = (&self.truncation, &self.base.truncation);
        TruncationRecord {
            levels: a.levels.or(b.levels),
            tol: a.tol.or(b.tol),
            max_terms: a.max_terms.or(b.max_terms),
            quadrature_nodes: a.quadrature_nodes.or(b.quadrature_nodes),
            categories: a.categories.or(b.categories),
            bound: a.bound.or(b.bound),
        }
    }

    pub fn build<T: Scalar>(&self) -> Result<CompositionProcess<T>> {
        let tr = self.truncation();
        CompositionProcess::new(self.base.build()?, self.particles, tr.categories, tr.levels())
            .map_err(|e| spec_err(e.to_string()))
    }
}

/// `{balls, p}` for the two-colour urn or `{balls, basis, rho}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UrnSpecRecord {
    pub balls: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<Value>>,
}

impl UrnSpecRecord {
    pub fn build<T: Scalar>(&self) -> Result<UrnSpec<T>> {
        let urn = match (&self.p, &self.basis, &self.rho) {
            (Some(p), None, None) => UrnSpec::two_colour(self.balls, from_json_value(p)?),
            (None, Some(b), Some(rho)) => {
                let rho = rho.iter().map(from_json_value).collect::<Result<Vec<T>>>()?;
                UrnSpec::new(self.balls, Basis::from_record(b)?, rho)
            }
            _ => return Err(spec_err("an urn needs either p, or both basis and rho")),
        };
        urn.map_err(|e| spec_err(e.to_string()))
    }
}

/// Any spec file, recognised by its distinguishing key: `family`, `base`
/// or `balls`.
#[derive(Clone, Debug, PartialEq)]
pub enum SpecFile {
    Process(ProcessSpecRecord),
    Composition(CompositionSpecRecord),
    Urn(UrnSpecRecord),
}

impl SpecFile {
    pub fn from_value(v: Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| spec_err("a spec must be a JSON object"))?;
        let parse = |e: serde_json::Error| spec_err(e.to_string());
        if obj.contains_key("family") {
            serde_json::from_value(v).map(Self::Process).map_err(parse)
        } else if obj.contains_key("base") {
            serde_json::from_value(v).map(Self::Composition).map_err(parse)
        } else if obj.contains_key("balls") {
            serde_json::from_value(v).map(Self::Urn).map_err(parse)
        } else {
            Err(spec_err("a spec needs a \"family\", \"base\" or \"balls\" field"))
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::from_value(serde_json::from_str(s).map_err(|e| spec_err(e.to_string()))?)
    }
}

/// One-dimensional transition result; `method` is `spectral` or `expm`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionRecord {
    pub i: usize,
    pub j: usize,
    pub t: Value,
    pub p: Value,
    pub method: String,
    pub truncation_error_estimate: f64,
    pub flagged: bool,
}

/// Composition or urn transition result; `method` is one of `spectral`,
/// `dual-spectral`, `product-oracle`, `expm`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositionTransitionRecord {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub t: Value,
    pub p: Value,
    pub method: String,
    pub truncation_error_estimate: f64,
    pub flagged: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use serde_json::json;

    #[test]
    fn builds_every_family() {
        let cases = [
            json!({"family": "mm-infinity", "params": {"lambda": "1/2", "mu": 1}}),
            json!({"family": "linear", "params": {"lambda": 1, "mu": 2, "beta": "3/2"}}),
            json!({"family": "two-urn", "params": {"a": 4, "b": 5, "N": 3}}),
            json!({"family": "ehrenfest", "params": {"N": 2, "p": "1/3"}}),
            json!({"family": "custom", "params": {"birth": [1, 0], "death": [0, 2]}}),
        ];
        for c in cases {
            let SpecFile::Process(r) = SpecFile::from_value(c.clone()).unwrap() else {
                panic!("{c}")
            };
            r.build::<Rational>().unwrap();
            r.build::<f64>().unwrap();
        }
        let r: ProcessSpecRecord =
            serde_json::from_value(json!({"family": "ehrenfest", "params": {"N": 2, "p": "1/3"}})).unwrap();
        assert_eq!(r.build::<Rational>().unwrap(), BirthDeathSpec::ehrenfest(2, rat(1, 3)).unwrap());
    }

    #[test]
    fn malformed_specs_are_rejected() {
        let bad = [
            json!({"family": "ehrenfest", "params": {"N": 2, "p": "1/3", "q": 1}}),
            json!({"family": "ehrenfest", "params": {"N": 2}}),
            json!({"family": "ehrenfest", "params": {"N": 2, "p": "3/2"}}),
            json!({"family": "nope"}),
            json!({"family": "ehrenfest", "params": {"N": 2, "p": "1/3"}, "extra": 0}),
            json!({"family": "ehrenfest", "params": {"N": -1, "p": "1/3"}}),
            json!({"balls": 2, "p": "1/2", "rho": []}),
            json!([1, 2]),
            json!({"what": 1}),
        ];
        for b in bad {
            let r = SpecFile::from_value(b.clone()).and_then(|s| match s {
                SpecFile::Process(p) => p.build::<Rational>().map(|_| ()),
                SpecFile::Composition(c) => c.build::<Rational>().map(|_| ()),
                SpecFile::Urn(u) => u.build::<Rational>().map(|_| ()),
            });
            assert!(matches!(r, Err(Error::Spec(_))), "{b}: {r:?}");
        }
    }

    #[test]
    fn composition_and_urn_specs() {
        let s = SpecFile::parse(
            r#"{"base": {"family": "mm-infinity", "params": {"lambda": 1, "mu": 1},
                "truncation": {"levels": 30}}, "N": 2, "truncation": {"categories": 6}}"#,
        )
        .unwrap();
        let SpecFile::Composition(c) = s else { panic!() };
        assert_eq!(c.truncation().levels(), 30);
        let proc = c.build::<f64>().unwrap();
        assert_eq!(proc.categories(), 6);
        let back: CompositionSpecRecord = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);

        let SpecFile::Urn(u) = SpecFile::parse(r#"{"balls": 3, "p": "2/3"}"#).unwrap() else {
            panic!()
        };
        assert_eq!(u.build::<Rational>().unwrap().colours(), 2);
        let basis = Basis::orthogonal_from(vec![rat(1, 3), rat(1, 3), rat(1, 3)]).unwrap();
        let rec = UrnSpecRecord {
            balls: 2,
            p: None,
            basis: Some(basis.to_record()),
            rho: Some(vec![json!("1/2"), json!("1/4")]),
        };
        let text = serde_json::to_string(&rec).unwrap();
        let SpecFile::Urn(u) = SpecFile::parse(&text).unwrap() else { panic!() };
        assert_eq!(u.build::<Rational>().unwrap().colours(), 3);
    }

    #[test]
    fn result_records_round_trip() {
        let r = TransitionRecord {
            i: 0,
            j: 1,
            t: json!("1/2"),
            p: json!(0.25),
            method: "spectral".into(),
            truncation_error_estimate: 0.0,
            flagged: false,
        };
        let back: TransitionRecord = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<TransitionRecord>(r#"{"i":0,"j":1,"t":1,"p":1,"method":"expm","truncation_error_estimate":0,"flagged":false,"z":1}"#).is_err());
    }
}
