//! Structured results with provenance, serialized as JSON or as a CSV defect
//! table. Output is deterministic: maps are ordered by key and floats use the
//! shortest round-tripping representation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::discrete::MetricFieldSpec;
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::rng::RNG_ID;

/// Curvature normalization: constant sectional curvature `λ` is `(λ/2) g²`.
pub const CURVATURE_NORMALIZATION: &str = "R=(lambda/2)g^2";
/// `ℓ₀ = −tr_g Hess`, nonnegative spectrum.
pub const LAPLACIAN_SIGN: &str = "positive-spectrum";
/// Orthonormal frame `E = L^{-T}` for `g = L Lᵀ`.
pub const FRAME_CONVENTION: &str = "cholesky-lower";

/// A float that also serializes when non-finite (as `"NaN"`, `"inf"`, `"-inf"`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(&self.0.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            F(f64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::F(v) => Ok(Num(v)),
            Raw::S(s) => match s.as_str() {
                "NaN" => Ok(Num(f64::NAN)),
                "inf" => Ok(Num(f64::INFINITY)),
                "-inf" => Ok(Num(f64::NEG_INFINITY)),
                _ => Err(serde::de::Error::custom(format!("`{s}` is not a non-finite number"))),
            },
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Conventions {
    pub curvature_normalization: String,
    pub laplacian_sign: String,
    pub frame: String,
    pub rng: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            curvature_normalization: CURVATURE_NORMALIZATION.into(),
            laplacian_sign: LAPLACIAN_SIGN.into(),
            frame: FRAME_CONVENTION.into(),
            rng: RNG_ID.into(),
        }
    }
}

/// A named result: a scalar, a vector, a matrix, a flag or a label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResultValue {
    Flag(bool),
    Scalar(Num),
    Vector(Vec<Num>),
    Matrix(Vec<Vec<Num>>),
    Text(String),
}

impl From<f64> for ResultValue {
    fn from(v: f64) -> Self {
        ResultValue::Scalar(Num(v))
    }
}

impl From<bool> for ResultValue {
    fn from(v: bool) -> Self {
        ResultValue::Flag(v)
    }
}

impl From<Vec<f64>> for ResultValue {
    fn from(v: Vec<f64>) -> Self {
        ResultValue::Vector(v.into_iter().map(Num).collect())
    }
}

impl From<Vec<Vec<f64>>> for ResultValue {
    fn from(v: Vec<Vec<f64>>) -> Self {
        ResultValue::Matrix(v.into_iter().map(|r| r.into_iter().map(Num).collect()).collect())
    }
}

impl From<&str> for ResultValue {
    fn from(v: &str) -> Self {
        ResultValue::Text(v.into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defect {
    pub value: Num,
    pub tolerance: Num,
    pub pass: bool,
}

impl Defect {
    /// Passes iff `value` is finite and at most `tolerance`.
    pub fn new(value: f64, tolerance: f64) -> Self {
        Defect {
            value: Num(value),
            tolerance: Num(tolerance),
            pass: value.is_finite() && value <= tolerance,
        }
    }

    /// Passes iff `value` is finite and at least `bound`; used for
    /// convergence orders and other lower bounds.
    pub fn at_least(value: f64, bound: f64) -> Self {
        Defect {
            value: Num(value),
            tolerance: Num(bound),
            pass: value.is_finite() && value >= bound,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarMode {
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Environment {
    pub scalar_mode: ScalarMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Environment {
    pub fn new(scalar_mode: ScalarMode) -> Self {
        Environment {
            scalar_mode,
            grid: None,
            spacing: None,
            eps: None,
            seed: None,
        }
    }
}

/// Computed invariants and defect checks with the conventions they assume.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantReport {
    pub subject: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricFieldSpec>,
    pub conventions: Conventions,
    pub results: BTreeMap<String, ResultValue>,
    pub defects: BTreeMap<String, Defect>,
    pub environment: Environment,
}

impl InvariantReport {
    pub fn new(subject: impl Into<String>, scalar_mode: ScalarMode) -> Self {
        InvariantReport {
            subject: subject.into(),
            model: None,
            metric: None,
            conventions: Conventions::default(),
            results: BTreeMap::new(),
            defects: BTreeMap::new(),
            environment: Environment::new(scalar_mode),
        }
    }

    pub fn with_model(mut self, model: ModelSpec) -> Self {
        self.model = Some(model);
        self
    }

    pub fn result(&mut self, name: impl Into<String>, value: impl Into<ResultValue>) {
        self.results.insert(name.into(), value.into());
    }

    pub fn defect(&mut self, name: impl Into<String>, defect: Defect) {
        self.defects.insert(name.into(), defect);
    }

    /// True iff every defect passes.
    pub fn passed(&self) -> bool {
        self.defects.values().all(|d| d.pass)
    }

    /// Names of failing defects.
    pub fn failures(&self) -> Vec<&str> {
        self.defects
            .iter()
            .filter(|(_, d)| !d.pass)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn merge(&mut self, prefix: &str, other: InvariantReport) {
        for (k, v) in other.results {
            self.results.insert(format!("{prefix}{k}"), v);
        }
        for (k, v) in other.defects {
            self.defects.insert(format!("{prefix}{k}"), v);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::UnknownFormat(other.into())),
        }
    }
}

pub const CSV_HEADER: [&str; 4] = ["name", "value", "tolerance", "pass"];

/// Serializes a report; CSV carries only the defect table.
pub fn emit(report: &InvariantReport, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).map_err(|e| Error::Parse(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::Parse(e.to_string());
            w.write_record(CSV_HEADER).map_err(csv_err)?;
            for (name, d) in &report.defects {
                w.write_record([
                    name.as_str(),
                    &d.value.to_string(),
                    &d.tolerance.to_string(),
                    if d.pass { "true" } else { "false" },
                ])
                .map_err(csv_err)?;
            }
            w.into_inner().map_err(|e| Error::Parse(e.to_string()))
        }
    }
}

/// Inverse of [`emit`] with [`Format::Json`].
pub fn parse_json(bytes: &[u8]) -> Result<InvariantReport> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Inverse of [`emit`] with [`Format::Csv`].
pub fn parse_defects_csv(bytes: &[u8]) -> Result<BTreeMap<String, Defect>> {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let mut out = BTreeMap::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let num = |s: &str| s.parse::<f64>().map(Num).map_err(|e| Error::Parse(e.to_string()));
        let pass = match &rec[3] {
            "true" => true,
            "false" => false,
            other => return Err(Error::Parse(format!("bad pass flag {other:?}"))),
        };
        out.insert(
            rec[0].to_string(),
            Defect {
                value: num(&rec[1])?,
                tolerance: num(&rec[2])?,
                pass,
            },
        );
    }
    Ok(out)
}
