use thiserror::Error;

use crate::gkm::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("the zero vector has no primitive part")]
    ZeroVector,

    #[error("vector {} is not primitive", tuple(.0))]
    NotPrimitive(Vec<i64>),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("denominator weight is the zero vector")]
    ZeroWeight,

    #[error("polynomial is not divisible by 1 - x^{}", tuple(.0))]
    NotDivisible(Vec<i64>),

    #[error("evaluation point lies on a pole of 1 - x^{}", tuple(.0))]
    PoleAtPoint(Vec<i64>),

    #[error("xi is not generic: weight {} ({what}) pairs to zero", tuple(.weight))]
    NotGeneric { what: String, weight: Vec<i64> },

    #[error("series expansion needs more than {budget} terms")]
    TruncationOverflow { budget: usize },

    #[error("exact division by 1 - x^{} failed while clearing the common denominator", tuple(.factor))]
    InternalDivisionFailure { factor: Vec<i64> },

    #[error("orientation by xi has a directed cycle through {}", .cycle.join(" -> "))]
    CycleError { cycle: Vec<String> },

    #[error("moment map is invalid on edge {edge}: {reason}")]
    InvalidMomentMap { edge: String, reason: String },

    #[error("value {value} is critical: it equals phi({vertex})")]
    NotRegular { vertex: String, value: String },

    #[error("expected exactly one critical value between the two levels, found {count}")]
    WrongWallCount { count: usize },

    #[error("zero is not a regular value: alpha_{vertex}(xi) = 0")]
    ZeroNotRegular { vertex: String },

    #[error("class is not symplectic")]
    NotSymplectic,

    #[error("no pole-free sample point found after {attempts} attempts")]
    SamplingExhausted { attempts: usize },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{} violation(s); first: {}", .0.len(), .0.first().map(|v| v.to_string()).unwrap_or_default())]
    Invalid(Vec<Violation>),
}

fn tuple(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}
