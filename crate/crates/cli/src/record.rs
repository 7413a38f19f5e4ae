//! The JSON record every subcommand prints.

use polyvol::rational::{format, to_f64};
use polyvol::{Error, Rational};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Guarantee {
    /// The value is never below the true volume.
    pub lower_exact: bool,
    /// `value <= upper_factor * volume`.
    pub upper_factor: String,
    /// `value >= lower_factor * volume`.
    pub lower_factor: String,
}

impl Guarantee {
    pub fn exact() -> Self {
        Self { lower_exact: true, upper_factor: "1".into(), lower_factor: "1".into() }
    }

    pub fn between(lower: &Rational, upper: &Rational, lower_exact: bool) -> Self {
        Self { lower_exact, upper_factor: decimal(upper), lower_factor: decimal(lower) }
    }

    /// Statistical estimates carry no deterministic factor.
    pub fn none() -> Self {
        Self { lower_exact: false, upper_factor: "inf".into(), lower_factor: "0".into() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub beta: Option<String>,
    pub delta: Option<String>,
    pub epsilon: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub engine: String,
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub guarantee: Guarantee,
    pub params: Params,
    pub wall_time_ms: u64,
    pub instance_digest: String,
    /// Factor applied after normalizing two general balls to `C(0,1) ∩ C(c,r)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lhs: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

impl ResultRecord {
    pub fn new(engine: &str, value: f64, guarantee: Guarantee, digest: String) -> Self {
        Self {
            engine: engine.into(),
            value: value.to_string(),
            exact: None,
            guarantee,
            params: Params::default(),
            wall_time_ms: 0,
            instance_digest: digest,
            scale: None,
            facets: None,
            half_width: None,
            samples: None,
            seed: None,
            lhs: None,
            rhs: None,
            pass: None,
        }
    }

    pub fn exact(engine: &str, value: &Rational, digest: String) -> Self {
        let mut record = Self::new(engine, to_f64(value), Guarantee::exact(), digest);
        record.exact = Some(format(value));
        record
    }
}

/// Shortest decimal that round-trips through `f64`.
pub fn decimal(q: &Rational) -> String {
    to_f64(q).to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub delta: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub engine: String,
    pub seed: u64,
    pub strategy: String,
    pub rows: Vec<BenchRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub error: String,
    pub message: String,
    pub exit_code: i32,
}

impl ErrorRecord {
    pub fn from_error(e: &Error) -> Self {
        let (kind, code) = match e {
            Error::InvalidInstance(_) | Error::DimensionMismatch { .. } => ("invalid_instance", 2),
            Error::Precondition(_) | Error::Unsupported(_) => ("precondition", 3),
            Error::DegenerateInput(_) | Error::OriginNotInterior | Error::Inconsistent(_) => ("degenerate_input", 4),
        };
        Self { error: kind.into(), message: e.to_string(), exit_code: code }
    }
}
