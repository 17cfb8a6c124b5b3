//! Config documents for each subcommand. Every default lives here and is echoed into the
//! output record through `Serialize`.

use hypshadow::boundary::DEFAULT_HORIZON;
use hypshadow::diagnostics::DiagnosticOptions;
use hypshadow::inverse::ApproxInverseParams;
use hypshadow::shadowing::{RefineMode, DEFAULT_KAPPA};
use hypshadow::{Error, Grade, ModelSpec, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::Command;

fn default_seed() -> u64 {
    0
}

fn default_grade() -> Grade {
    Grade::Infinity
}

fn default_k_list() -> Vec<i64> {
    vec![16, 32, 64]
}

fn default_samples() -> usize {
    100
}

fn default_half() -> i64 {
    32
}

fn default_splitting_iters() -> usize {
    40
}

fn default_kappa() -> f64 {
    DEFAULT_KAPPA
}

fn default_max_iter() -> usize {
    50
}

fn default_pesin_half() -> i64 {
    64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DiagnoseTest {
    #[default]
    Mather,
    Nonuniform,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub test: DiagnoseTest,
    #[serde(default = "default_grade")]
    pub grade: Grade,
    /// Coarser grade of the two-grade test.
    #[serde(default)]
    pub grade_low: Option<Grade>,
    #[serde(default = "default_k_list")]
    pub k_list: Vec<i64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Explicit sample points; replaces Lebesgue sampling.
    #[serde(default)]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub options: DiagnosticOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InverseMethod {
    #[default]
    Splitting,
    MinNorm,
    Neumann,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSpec {
    pub x0: Vec<f64>,
    pub k_min: i64,
    pub k_max: i64,
    pub beta_target: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShadowConfig {
    pub model: ModelSpec,
    /// Pseudo-orbit CSV with header `k,x_1,...,x_d`, relative to the config file.
    #[serde(default)]
    pub pseudo_orbit: Option<String>,
    #[serde(default)]
    pub generate: Option<GenerateSpec>,
    #[serde(default)]
    pub inverse: InverseMethod,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Bound on the pseudo-orbit defect; defaults to the measured defect.
    #[serde(default)]
    pub beta: Option<f64>,
    /// Shadowing radius; defaults to `Kβ/(1 − κ)`.
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub mode: RefineMode,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_grade")]
    pub grade: Grade,
    #[serde(default = "default_splitting_iters")]
    pub splitting_iters: usize,
    #[serde(default = "default_pesin_half")]
    pub pesin_half: i64,
    #[serde(default)]
    pub approx: ApproxInverseParams,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_epsilon() -> f64 {
    0.05
}

fn default_residence_samples() -> usize {
    10_000
}

fn default_delta() -> f64 {
    0.1
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON
}

fn default_certificate_points() -> usize {
    200
}

fn default_certificate_half() -> i64 {
    16
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub radii: Vec<f64>,
    pub slowdowns: Vec<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_residence_samples")]
    pub samples: usize,
    /// Grade of the certificate; defaults to the least admissible grade.
    #[serde(default)]
    pub n: Option<u32>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_certificate_points")]
    pub certificate_points: usize,
    #[serde(default = "default_certificate_half")]
    pub certificate_half: i64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_decay_offsets() -> i64 {
    20
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseConfig {
    pub model: ModelSpec,
    pub x0: Vec<f64>,
    #[serde(default = "default_half")]
    pub half: i64,
    #[serde(default = "default_grade")]
    pub grade: Grade,
    #[serde(default)]
    pub method: InverseMethod,
    #[serde(default = "default_splitting_iters")]
    pub splitting_iters: usize,
    #[serde(default = "default_decay_offsets")]
    pub decay_offsets: i64,
}

fn default_norm_grades() -> Vec<Grade> {
    vec![Grade::Finite(1), Grade::Finite(2), Grade::Finite(4), Grade::Infinity]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsConfig {
    pub model: ModelSpec,
    pub x0: Vec<f64>,
    #[serde(default = "default_half")]
    pub half: i64,
    #[serde(default = "default_norm_grades")]
    pub grades: Vec<Grade>,
    #[serde(default = "default_splitting_iters")]
    pub splitting_iters: usize,
}

fn required(cmd: Command) -> &'static [&'static str] {
    match cmd {
        Command::Diagnose => &["model"],
        Command::Shadow => &["model"],
        Command::Boundary => &["radii", "slowdowns"],
        Command::Inverse => &["model", "x0"],
        Command::Norms => &["model", "x0"],
    }
}

/// Rejects non-object documents and lists every missing required key at once.
pub fn check_required(cmd: Command, doc: &Value) -> Result<()> {
    let Some(obj) = doc.as_object() else {
        return Err(Error::Config("config must be a JSON object".into()));
    };
    let missing: Vec<&str> = required(cmd).iter().copied().filter(|k| !obj.contains_key(*k)).collect();
    if !missing.is_empty() {
        return Err(Error::Config(format!("missing required fields for `{}`: {}", cmd.name(), missing.join(", "))));
    }
    if cmd == Command::Shadow && !obj.contains_key("pseudo_orbit") && !obj.contains_key("generate") {
        return Err(Error::Config("missing required fields for `shadow`: one of pseudo_orbit, generate".into()));
    }
    Ok(())
}

/// Deserializes with the failing field path in the error.
pub fn parse<T: DeserializeOwned>(doc: Value) -> Result<T> {
    serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        Error::Config(format!("at `{path}`: {}", e.into_inner()))
    })
}

/// Applies `--seed` on top of the document.
pub fn override_seed(doc: &mut Value, seed: Option<u64>) {
    if let (Some(s), Some(obj)) = (seed, doc.as_object_mut()) {
        obj.insert("seed".into(), Value::from(s));
    }
}
