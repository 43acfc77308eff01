use std::fmt;

use thiserror::Error;

use crate::mdp::{Action, State};

/// A single violated constraint on [`QueueParams`](crate::QueueParams).
#[derive(Debug, Clone, PartialEq)]
pub enum ParamViolation {
    BufferNotAboveBatch { buffer: usize, batch: usize },
    BatchZero,
    MaxServiceZero,
    AlphaOutOfRange(f64),
    LambdaNegative(f64),
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BufferNotAboveBatch { buffer, batch } => {
                write!(f, "B must exceed M (B = {buffer}, M = {batch})")
            }
            Self::BatchZero => write!(f, "M must be at least 1"),
            Self::MaxServiceZero => write!(f, "C must be at least 1"),
            Self::AlphaOutOfRange(a) => write!(f, "alpha must lie in (0, 1), got {a}"),
            Self::LambdaNegative(l) => write!(f, "lambda must be non-negative, got {l}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {}", join(.0))]
    InvalidParams(Vec<ParamViolation>),

    #[error("action {action} is not feasible in state {state}")]
    InfeasibleAction { state: State, action: Action },

    #[error("policy has {got} entries, expected {expected}")]
    PolicyLength { expected: usize, got: usize },

    #[error("relative value iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("stationary distribution solve is singular")]
    Singular,

    #[error("power budget {budget} is below the minimum achievable average power {min_power}")]
    InfeasibleBudget { budget: f64, min_power: f64 },

    #[error("bonus is undefined for visit count {k} at step {t}")]
    BonusDomain { k: u64, t: u64 },

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn join(v: &[ParamViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
