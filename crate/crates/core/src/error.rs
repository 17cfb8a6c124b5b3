use std::fmt;

use serde::Serialize;

/// Which side of an approximate inverse a defect was measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `Θ̃Γ − I`
    Left,
    /// `ΓΘ̃ − I`
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

/// Terms of the approximate-inverse error budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetTerm {
    /// Truncation tail, `λ^q` (left) or `λ^p` (right).
    Tail,
    /// Damping loss `c1 (1 − λ) c3`.
    Damping,
    /// Distance between the pseudo-orbit and the graded reference orbits.
    Closeness,
    /// Mismatch of neighbouring central rows, `c4(p) e(p)`.
    Continuity,
}

impl fmt::Display for BudgetTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BudgetTerm::Tail => "tail",
            BudgetTerm::Damping => "damping",
            BudgetTerm::Closeness => "closeness",
            BudgetTerm::Continuity => "continuity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("degenerate splitting: {0}")]
    DegenerateSplitting(String),

    #[error("grade too coarse: lambda * exp(1/n) = {0} >= 1")]
    GradeTooCoarse(f64),

    #[error("decay certificate violated at block ({i}, {j}): |B| = {norm:e} > {bound:e}")]
    CertificateViolation { i: i64, j: i64, norm: f64, bound: f64 },

    #[error(
        "pseudo-orbit too far: {side} defect {measured} > 1/2; largest budget term is {term} = {value}"
    )]
    PseudoOrbitTooFar { side: Side, measured: f64, term: BudgetTerm, value: f64 },

    #[error("contraction violated at step {step}: defect {current:e} >= previous {previous:e}")]
    ContractionViolated { step: usize, previous: f64, current: f64 },

    #[error("radius exceeded at step {step}: sup |xi| = {norm:e} > rho = {rho:e}")]
    RhoViolation { step: usize, norm: f64, rho: f64 },

    #[error("no convergence after {iterations} iterations: defect {defect:e}")]
    NoConvergence { iterations: usize, defect: f64 },

    #[error("family construction failed, condition {condition}: {detail}")]
    FamilyConstruction { condition: String, detail: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse: {0}")]
    Parse(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Numeric,
    Precondition,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::Parse(_) | Error::Dimension(_) | Error::Validation(_) => {
                ErrorKind::Usage
            }
            Error::Precondition(_)
            | Error::GradeTooCoarse(_)
            | Error::PseudoOrbitTooFar { .. }
            | Error::RhoViolation { .. }
            | Error::FamilyConstruction { .. } => ErrorKind::Precondition,
            Error::Io(_) => ErrorKind::Usage,
            _ => ErrorKind::Numeric,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
