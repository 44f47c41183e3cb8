//! Evidence on infinite chains: certified truncation brackets for hitting
//! probabilities and seeded Monte Carlo runs.
//!
//! Simulation output is descriptive. A finite run cannot decide `Fin` or
//! `Inf`; the series only illustrates the almost-sure limits.

mod interval;
mod simulate;

use thiserror::Error;

pub use interval::{bounded_reach_interval, bounded_reach_interval_with_majorant, ProbabilityInterval};
pub use simulate::{simulate_return_probability, visit_frequency, SeriesPoint, SimulationSeries, DEFAULT_STRIDE};

use crate::certificate::EvaluationError;
use crate::chain::{ChainError, StateId};
use crate::scalar::{rat, Rational};

/// Seed of the reference lending-casino simulation.
pub const REFERENCE_SEED: u64 = 2024;

/// Bias `ε = 1/20` of the reference lending-casino simulation.
pub fn reference_eps() -> Rational {
    rat(1, 20)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error("initial state {0} lies outside the window")]
    WindowNotClosed(StateId),
    #[error("majorant is not exact at {0}")]
    InexactMajorant(StateId),
    #[error("majorant violates its supermartingale conditions at {0}")]
    InvalidMajorant(StateId),
    #[error("steps and stride must be positive")]
    InvalidLength,
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}
