use std::fmt;

use crate::scalars::FieldSpec;

pub type Result<T> = std::result::Result<T, Error>;

/// The admissibility condition a cycle failed, with the level where it failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// 1-based level `i` of the offending relation `P_i`.
    pub level: usize,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    NotMonic,
    DegreeBound { var: usize, degree: u32, bound: u32 },
    ConstantTermNotUnit,
    VanishesAtOne,
    ZeroRelation,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = self.level;
        match &self.kind {
            ViolationKind::NotMonic => write!(f, "P{i} is not monic in y{i}"),
            ViolationKind::DegreeBound { var, degree, bound } => write!(
                f,
                "P{i} has a coefficient of degree {degree} in y{var}, bound is {bound}"
            ),
            ViolationKind::ConstantTermNotUnit => {
                write!(f, "constant term of P{i} is not a unit")
            }
            ViolationKind::VanishesAtOne => write!(f, "P{i} vanishes at y{i}=1"),
            ViolationKind::ZeroRelation => write!(f, "P{i} is zero"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("mixed fields: {0} and {1}")]
    MixedFields(FieldSpec, FieldSpec),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("precision {requested} requested but only {available} available")]
    PrecisionRequest { requested: usize, available: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("divisor is not monic in y{}", .0 + 1)]
    NotMonic(usize),
    #[error("{0}")]
    ValidationFailure(Violation),
    #[error("excluded value: {0}")]
    ExcludedValue(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("no relation: {0}")]
    NoRelation(String),
    #[error("schedule violation: index {index} with degree vector {degrees:?}")]
    ScheduleViolation { index: usize, degrees: Vec<u32> },
    #[error("degree vector is all ones")]
    AllOnes,
    #[error("iteration cap {cap} exceeded (expected at most {expected} steps)")]
    IterationCapExceeded { cap: usize, expected: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("not a relative unit: {0}")]
    NotRelative(String),
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line: 1,
            column,
            message: message.into(),
        }
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::ValidationFailure(_)
            | Error::InvalidField(_)
            | Error::ShapeMismatch(_)
            | Error::MixedFields(..) => 2,
            Error::PrecisionExhausted(_) | Error::IterationCapExceeded { .. } => 4,
            _ => 3,
        }
    }

    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MixedFields(..) => "MixedFields",
            Error::DivisionByZero => "DivisionByZero",
            Error::InvalidField(_) => "InvalidField",
            Error::NotAUnit(_) => "NotAUnit",
            Error::PrecisionRequest { .. } => "PrecisionRequest",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::NotMonic(_) => "NotMonic",
            Error::ValidationFailure(_) => "ValidationFailure",
            Error::ExcludedValue(_) => "ExcludedValue",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::NoRelation(_) => "NoRelation",
            Error::ScheduleViolation { .. } => "ScheduleViolation",
            Error::AllOnes => "AllOnes",
            Error::IterationCapExceeded { .. } => "IterationCapExceeded",
            Error::Unsupported(_) => "Unsupported",
            Error::NotRelative(_) => "NotRelative",
            Error::Parse { .. } => "Parse",
        }
    }
}
