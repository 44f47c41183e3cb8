//! Checkers for safety certificates, absorbing-region decompositions and the
//! two supermartingale proof rules for Streett conditions.
//!
//! On infinite chains every universally quantified condition is checked on a
//! finite window of states and a passing check is reported as
//! [`Verdict::PassOnWindow`], never [`Verdict::Pass`].

mod checks;
mod functions;
mod report;

use thiserror::Error;

pub use checks::{
    check_decomposition_semantic, check_qual_safety, check_quant_safety, check_rule1, check_rule2,
    decomposition_with, CheckOptions, Checker, Window,
};
pub use functions::{
    casino, DecompositionWitness, EvaluationError, MonotoneScalarFunction, RankingFunction, Role, Rule1Bundle,
    Rule1Pair, Rule2Bundle, Rule2Pair, ValueFunction,
};
pub use report::{
    CheckReport, ConditionEntry, LevelValue, Relation, Verdict, Violation, Witness, MAX_WITNESSES,
};

use crate::chain::{ChainError, StateId};
use crate::oracle::OracleError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertError {
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("r-grid is empty")]
    EmptyRGrid,
    #[error("state {0} lies in both A and J")]
    DisjointnessViolation(StateId),
    #[error("expected {expected} entries, one per Streett pair, found {found}")]
    PairCountMismatch { expected: usize, found: usize },
    #[error("an infinite chain needs an explicit window")]
    WindowRequired,
}
