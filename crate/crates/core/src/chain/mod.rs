//! States, distributions, kernels, regions and trajectories of a
//! time-homogeneous Markov chain over a countable universe.

mod distribution;
mod region;
mod state;
mod trajectory;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

pub use distribution::Distribution;
pub use region::Region;
pub use state::StateId;
pub use trajectory::{sample_trajectory, trajectory_rng, HittingTime, Trajectory};
pub(crate) use trajectory::Sampler;

use crate::scalar::{Probability, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("state {0} is outside the chain's universe")]
    StateOutsideUniverse(StateId),
    #[error("distribution has empty support")]
    EmptyDistribution,
    #[error("probability {value} at state {state} is outside [0,1]")]
    ProbabilityOutOfRange { state: StateId, value: Rational },
    #[error("probabilities sum to {sum}, not 1")]
    NotNormalized { sum: Rational },
    #[error("row of state {state} is invalid: {reason}")]
    InvalidRow { state: StateId, reason: String },
    #[error("shift by {index} out of range for trajectory of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("operation requires a finite state universe")]
    InfiniteUniverse,
    #[error("trajectory length must be at least 1")]
    InvalidLength,
}

/// Description of the state universe a kernel ranges over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Universe {
    /// Explicit finite state set, sorted.
    Finite(Vec<StateId>),
    /// Countably infinite universe produced by a named generator family.
    Generated { family: String, params: Vec<(String, String)> },
}

/// Transition kernel with finite support per state.
///
/// Implementations must be deterministic: repeated calls on the same state
/// return identical distributions.
pub trait Kernel: Send + Sync {
    fn successors(&self, state: &StateId) -> Result<Distribution, ChainError>;
    fn universe(&self) -> &Universe;
}

/// Kernel given by an explicit table of rows.
#[derive(Clone, Debug)]
pub struct ExplicitKernel {
    rows: BTreeMap<StateId, Distribution>,
    universe: Universe,
}

impl ExplicitKernel {
    /// Every successor must itself have a row.
    pub fn new(rows: BTreeMap<StateId, Distribution>) -> Result<Self, ChainError> {
        for (state, row) in &rows {
            for succ in row.support() {
                if !rows.contains_key(succ) {
                    return Err(ChainError::InvalidRow {
                        state: state.clone(),
                        reason: format!("successor {succ} has no row"),
                    });
                }
            }
        }
        let universe = Universe::Finite(rows.keys().cloned().collect());
        Ok(ExplicitKernel { rows, universe })
    }

    pub fn rows(&self) -> &BTreeMap<StateId, Distribution> {
        &self.rows
    }
}

impl Kernel for ExplicitKernel {
    fn successors(&self, state: &StateId) -> Result<Distribution, ChainError> {
        self.rows
            .get(state)
            .cloned()
            .ok_or_else(|| ChainError::StateOutsideUniverse(state.clone()))
    }

    fn universe(&self) -> &Universe {
        &self.universe
    }
}

/// Observation function mapping states to sets of atomic propositions.
#[derive(Clone)]
pub struct Labeling(Arc<dyn Fn(&StateId) -> BTreeSet<String> + Send + Sync>);

impl Labeling {
    pub fn new(f: impl Fn(&StateId) -> BTreeSet<String> + Send + Sync + 'static) -> Self {
        Labeling(Arc::new(f))
    }

    /// Table lookup; states absent from the table carry no propositions.
    pub fn from_table(table: BTreeMap<StateId, BTreeSet<String>>) -> Self {
        Labeling::new(move |s| table.get(s).cloned().unwrap_or_default())
    }

    pub fn label(&self, state: &StateId) -> BTreeSet<String> {
        (self.0)(state)
    }
}

impl fmt::Debug for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Labeling(..)")
    }
}

/// Initial distribution plus kernel, optionally labelled.
#[derive(Clone)]
pub struct MarkovChain {
    initial: Distribution,
    kernel: Arc<dyn Kernel>,
    labeling: Option<Labeling>,
}

impl MarkovChain {
    pub fn new(initial: Distribution, kernel: Arc<dyn Kernel>) -> Result<Self, ChainError> {
        if let Universe::Finite(states) = kernel.universe() {
            for s in initial.support() {
                if states.binary_search(s).is_err() {
                    return Err(ChainError::StateOutsideUniverse(s.clone()));
                }
            }
        }
        Ok(MarkovChain {
            initial,
            kernel,
            labeling: None,
        })
    }

    /// Finite chain from explicit rows.
    pub fn explicit(
        initial: Distribution,
        rows: impl IntoIterator<Item = (StateId, Distribution)>,
    ) -> Result<Self, ChainError> {
        let kernel = ExplicitKernel::new(rows.into_iter().collect())?;
        Self::new(initial, Arc::new(kernel))
    }

    pub fn with_labeling(mut self, labeling: Labeling) -> Self {
        self.labeling = Some(labeling);
        self
    }

    /// Same kernel and labelling, different initial distribution.
    pub fn with_initial(&self, initial: Distribution) -> Result<Self, ChainError> {
        let mut chain = Self::new(initial, Arc::clone(&self.kernel))?;
        chain.labeling = self.labeling.clone();
        Ok(chain)
    }

    pub fn initial(&self) -> &Distribution {
        &self.initial
    }

    pub fn kernel(&self) -> &Arc<dyn Kernel> {
        &self.kernel
    }

    pub fn labeling(&self) -> Option<&Labeling> {
        self.labeling.as_ref()
    }

    pub fn successors(&self, state: &StateId) -> Result<Distribution, ChainError> {
        self.kernel.successors(state)
    }

    pub fn universe(&self) -> &Universe {
        self.kernel.universe()
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kernel.universe(), Universe::Finite(_))
    }

    /// Sorted state list of a finite chain.
    pub fn states(&self) -> Result<&[StateId], ChainError> {
        match self.kernel.universe() {
            Universe::Finite(states) => Ok(states),
            Universe::Generated { .. } => Err(ChainError::InfiniteUniverse),
        }
    }

    /// States reachable from the initial support, in breadth-first order.
    /// Stops after `limit` states on infinite chains.
    pub fn reachable(&self, limit: usize) -> Result<Vec<StateId>, ChainError> {
        let mut seen: BTreeSet<StateId> = BTreeSet::new();
        let mut order = Vec::new();
        let mut queue: std::collections::VecDeque<StateId> = self.initial.support().cloned().collect();
        while let Some(s) = queue.pop_front() {
            if order.len() >= limit {
                break;
            }
            if !seen.insert(s.clone()) {
                continue;
            }
            for u in self.successors(&s)?.support() {
                if !seen.contains(u) {
                    queue.push_back(u.clone());
                }
            }
            order.push(s);
        }
        Ok(order)
    }
}

impl fmt::Debug for MarkovChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarkovChain")
            .field("initial", &self.initial)
            .field("universe", self.kernel.universe())
            .field("labelled", &self.labeling.is_some())
            .finish()
    }
}

/// Point mass at `state`.
pub fn dirac(state: StateId) -> Distribution {
    Distribution::dirac(state)
}

/// `P_μ(Φ₀ ∈ A₀ ∧ … ∧ Φₙ ∈ Aₙ)` by forward sum-product over the kernel.
///
/// The mass vector always has finite support because the initial distribution
/// and every kernel row do, so this works on generated chains as well.
pub fn prefix_probability(chain: &MarkovChain, constraints: &[Region]) -> Result<Probability, ChainError> {
    let Some((first, rest)) = constraints.split_first() else {
        return Ok(Probability::one());
    };
    let mut mass: BTreeMap<StateId, Probability> = chain
        .initial()
        .iter()
        .filter(|(s, _)| first.contains(s))
        .map(|(s, p)| (s.clone(), p.clone()))
        .collect();
    for region in rest {
        let mut next: BTreeMap<StateId, Probability> = BTreeMap::new();
        for (s, m) in &mass {
            for (u, p) in chain.successors(s)?.iter() {
                if region.contains(u) {
                    *next.entry(u.clone()).or_insert_with(Probability::zero) += m * p;
                }
            }
        }
        mass = next;
        if mass.is_empty() {
            break;
        }
    }
    Ok(mass.into_values().sum())
}
