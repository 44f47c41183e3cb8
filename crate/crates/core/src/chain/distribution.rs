use num_traits::{One, Signed, Zero};

use super::{ChainError, StateId};
use crate::scalar::Probability;

/// Finite-support probability distribution with exact rational masses.
///
/// Support points are kept sorted and unique; every mass is strictly positive
/// and the masses sum to exactly one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    support: Vec<(StateId, Probability)>,
}

impl Distribution {
    /// Builds a distribution, merging repeated states.
    pub fn new(points: impl IntoIterator<Item = (StateId, Probability)>) -> Result<Self, ChainError> {
        let mut support: Vec<(StateId, Probability)> = Vec::new();
        let mut raw: Vec<(StateId, Probability)> = points.into_iter().collect();
        raw.sort_by(|a, b| a.0.cmp(&b.0));
        for (state, p) in raw {
            if p.is_negative() || p > Probability::one() {
                return Err(ChainError::ProbabilityOutOfRange { state, value: p });
            }
            match support.last_mut() {
                Some((last, mass)) if *last == state => *mass += p,
                _ => support.push((state, p)),
            }
        }
        support.retain(|(_, p)| !p.is_zero());
        if support.is_empty() {
            return Err(ChainError::EmptyDistribution);
        }
        let total: Probability = support.iter().map(|(_, p)| p.clone()).sum();
        if !total.is_one() {
            return Err(ChainError::NotNormalized { sum: total });
        }
        Ok(Distribution { support })
    }

    /// Point mass at `state`.
    pub fn dirac(state: StateId) -> Self {
        Distribution {
            support: vec![(state, Probability::one())],
        }
    }

    /// Uniform distribution over distinct states.
    pub fn uniform(states: impl IntoIterator<Item = StateId>) -> Result<Self, ChainError> {
        let states: Vec<StateId> = states.into_iter().collect();
        let n = states.len() as i64;
        if n == 0 {
            return Err(ChainError::EmptyDistribution);
        }
        Self::new(states.into_iter().map(|s| (s, crate::scalar::rat(1, n))))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&StateId, &Probability)> {
        self.support.iter().map(|(s, p)| (s, p))
    }

    pub fn support(&self) -> impl Iterator<Item = &StateId> {
        self.support.iter().map(|(s, _)| s)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn prob(&self, state: &StateId) -> Probability {
        self.support
            .binary_search_by(|(s, _)| s.cmp(state))
            .map(|i| self.support[i].1.clone())
            .unwrap_or_else(|_| Probability::zero())
    }

    /// Total mass on states satisfying `pred`.
    pub fn mass_where(&self, mut pred: impl FnMut(&StateId) -> bool) -> Probability {
        self.support
            .iter()
            .filter(|(s, _)| pred(s))
            .map(|(_, p)| p.clone())
            .sum()
    }

    /// Maps every support point through `f`, merging collisions.
    pub fn map_states(&self, mut f: impl FnMut(&StateId) -> StateId) -> Self {
        let mapped: Vec<_> = self.support.iter().map(|(s, p)| (f(s), p.clone())).collect();
        Self::new(mapped).expect("relabelling preserves normalisation")
    }
}
