use thiserror::Error;

use crate::parser::ParseError;
use crate::model::{RuleError, WorldMode};

#[derive(Debug, Error)]
pub enum PdError {
    #[error("language has {n} atoms, above the world cap of {cap} (set PD_WORLD_CAP to raise it)")]
    WorldCap { n: usize, cap: usize },

    #[error("literal refers to atom {atom} but the language has {n} atoms")]
    UnresolvedLiteral { atom: usize, n: usize },

    #[error("unknown literal `{0}`")]
    UnknownLiteral(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Rule(#[from] RuleError),

    #[error("matrix is singular")]
    Singular,

    #[error("rule set is not Rule-PSAT: no distribution satisfies the p-rules")]
    NotRulePsat,

    #[error("rule set is Rule-PSAT but not P-CWA consistent")]
    NotPcwaConsistent,

    #[error("linear system has no solution ({mode:?} encoding)")]
    Infeasible { mode: WorldMode },

    #[error("simplex exceeded its pivot budget of {0}")]
    PivotLimit(usize),

    #[error("invalid solver configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("bench generation failed: {0}")]
    Bench(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl PdError {
    /// Errors that mean "the input has no model", as opposed to bad input.
    pub fn is_semantic(&self) -> bool {
        matches!(
            self,
            PdError::NotRulePsat | PdError::NotPcwaConsistent | PdError::Infeasible { .. }
        )
    }
}

pub type Result<T, E = PdError> = std::result::Result<T, E>;
