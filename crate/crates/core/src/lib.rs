//! Exact Streett-acceptance model checking on countable Markov chains, with
//! checkers and synthesizers for absorbing-region decompositions and
//! supermartingale certificates.

pub mod approx;
pub mod certificate;
pub mod chain;
pub mod cli;
pub mod families;
pub mod model;
pub mod omega;
pub mod oracle;
pub mod random;
pub mod scalar;
pub mod synthesis;

pub use chain::{
    dirac, prefix_probability, sample_trajectory, ChainError, Distribution, HittingTime, MarkovChain, Region,
    StateId, Trajectory,
};
pub use omega::{product, Dsa, StreettCondition};
pub use oracle::Oracle;
pub use scalar::{Probability, Rational, Scalar};
