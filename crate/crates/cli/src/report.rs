use ccpt::baselines::ComplexityReport;
use ccpt::PeriodStrengthProfile;
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "ccpt-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub length: usize,
    pub real: bool,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub frequency: Option<f64>,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strength {
    pub period: usize,
    pub raw: f64,
    pub normalized: f64,
}

pub fn strengths(profile: &PeriodStrengthProfile) -> Vec<Strength> {
    profile
        .iter()
        .zip(profile.normalized())
        .map(|((period, raw), normalized)| Strength {
            period,
            raw,
            normalized,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictionaryInfo {
    pub basis: String,
    pub p_max: usize,
    pub penalty_exponent: f64,
    pub width: usize,
    pub residual: f64,
    pub condition: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ridge: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub length: usize,
    pub detected: Vec<usize>,
    pub strengths: Vec<Strength>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanInfo {
    pub n1: usize,
    pub jobs: usize,
    pub duplicated_subspaces: usize,
    pub rows: Vec<ScanRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub method: String,
    pub divisor_periods: bool,
    pub non_divisor_periods: bool,
    pub frequency: bool,
    pub multiplications: String,
    pub complexity: ComplexityReport,
    pub runtime_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub estimated_period: Option<usize>,
    pub detected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub method: String,
    pub input: InputInfo,
    pub threshold: f64,
    #[serde(default)]
    pub coefficients: Vec<Coefficient>,
    #[serde(default)]
    pub strengths: Vec<Strength>,
    #[serde(default)]
    pub detected: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub estimated_period: Option<usize>,
    pub runtime_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub complexity: Option<ComplexityReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dictionary: Option<DictionaryInfo>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scan: Option<ScanInfo>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub comparison: Vec<CompareRow>,
}

impl Report {
    pub fn new(command: &str, method: &str, input: InputInfo, threshold: f64) -> Self {
        Report {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            method: method.to_string(),
            input,
            threshold,
            coefficients: Vec::new(),
            strengths: Vec::new(),
            detected: Vec::new(),
            estimated_period: None,
            runtime_seconds: 0.0,
            complexity: None,
            dictionary: None,
            scan: None,
            comparison: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
