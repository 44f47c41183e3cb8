//! Exact ground truth on finite chains: bottom strongly connected components,
//! hitting and return probabilities, Streett acceptance probabilities and the
//! Orey condition.
//!
//! Everything rests on the finite-chain fact that a run almost surely enters a
//! bottom SCC and then visits each of its states infinitely often, so a pair
//! `(A, B)` holds on a run iff the BSCC it ends in avoids `A` or meets `B`.

pub(crate) mod linear;

use std::collections::HashMap;

use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::chain::{ChainError, Distribution, MarkovChain, Region, StateId};
use crate::omega::StreettCondition;
use crate::scalar::{Probability, Rational};
use linear::Rows;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("exact analysis needs a finite chain")]
    InfiniteChain,
    #[error("state {0} is not part of the chain")]
    UnknownState(StateId),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// A bottom strongly connected component with per-pair acceptance flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bscc {
    pub states: Vec<StateId>,
    pub accepting: Vec<bool>,
}

impl Bscc {
    pub fn is_accepting(&self) -> bool {
        self.accepting.iter().all(|&a| a)
    }
}

/// Map from state to exact probability.
pub type ProbabilityVector = std::collections::BTreeMap<StateId, Probability>;

/// Indexed view of a finite chain shared by all exact computations.
#[derive(Clone, Debug)]
pub struct Oracle {
    chain: MarkovChain,
    states: Vec<StateId>,
    index: HashMap<StateId, usize>,
    rows: Rows,
    initial: Vec<(usize, Rational)>,
}

impl Oracle {
    pub fn new(chain: &MarkovChain) -> Result<Self, OracleError> {
        let states = chain.states().map_err(|_| OracleError::InfiniteChain)?.to_vec();
        let index: HashMap<StateId, usize> =
            states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let lookup = |s: &StateId| index.get(s).copied().ok_or_else(|| OracleError::UnknownState(s.clone()));
        let mut rows = Vec::with_capacity(states.len());
        for s in &states {
            let row = chain.successors(s)?;
            rows.push(
                row.iter()
                    .map(|(u, p)| Ok((lookup(u)?, p.clone())))
                    .collect::<Result<Vec<_>, OracleError>>()?,
            );
        }
        let initial = chain
            .initial()
            .iter()
            .map(|(s, p)| Ok((lookup(s)?, p.clone())))
            .collect::<Result<Vec<_>, OracleError>>()?;
        Ok(Oracle {
            chain: chain.clone(),
            states,
            index,
            rows,
            initial,
        })
    }

    pub fn chain(&self) -> &MarkovChain {
        &self.chain
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    fn idx(&self, s: &StateId) -> Result<usize, OracleError> {
        self.index.get(s).copied().ok_or_else(|| OracleError::UnknownState(s.clone()))
    }

    fn mask(&self, region: &Region) -> Vec<bool> {
        self.states.iter().map(|s| region.contains(s)).collect()
    }

    fn vector(&self, values: Vec<Rational>) -> ProbabilityVector {
        self.states.iter().cloned().zip(values).collect()
    }

    fn weigh(&self, dist: &[(usize, Rational)], values: &[Rational]) -> Probability {
        dist.iter().map(|(s, p)| p * &values[*s]).sum()
    }

    fn dist_indices(&self, from: &Distribution) -> Result<Vec<(usize, Rational)>, OracleError> {
        from.iter().map(|(s, p)| Ok((self.idx(s)?, p.clone()))).collect()
    }

    /// Every bottom SCC of the whole state graph, as sorted index lists.
    fn all_bsccs(&self) -> Vec<Vec<usize>> {
        let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(self.states.len(), 0);
        let nodes: Vec<_> = (0..self.states.len()).map(|_| graph.add_node(())).collect();
        for (s, row) in self.rows.iter().enumerate() {
            for (u, _) in row {
                graph.add_edge(nodes[s], nodes[*u], ());
            }
        }
        let mut component = vec![usize::MAX; self.states.len()];
        let sccs = tarjan_scc(&graph);
        for (c, scc) in sccs.iter().enumerate() {
            for n in scc {
                component[n.index()] = c;
            }
        }
        let mut bottoms: Vec<Vec<usize>> = sccs
            .iter()
            .enumerate()
            .filter(|(c, scc)| {
                scc.iter()
                    .all(|n| self.rows[n.index()].iter().all(|(u, _)| component[*u] == *c))
            })
            .map(|(_, scc)| {
                let mut members: Vec<usize> = scc.iter().map(|n| n.index()).collect();
                members.sort_unstable();
                members
            })
            .collect();
        bottoms.sort();
        bottoms
    }

    fn reachable_from_initial(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut stack: Vec<usize> = self.initial.iter().map(|(s, _)| *s).collect();
        while let Some(s) = stack.pop() {
            if !std::mem::replace(&mut seen[s], true) {
                stack.extend(self.rows[s].iter().map(|(u, _)| *u));
            }
        }
        seen
    }

    fn flags(&self, members: &[usize], cond: &StreettCondition) -> Vec<bool> {
        cond.pairs()
            .iter()
            .map(|(a, b)| {
                let meets = |r: &Region| members.iter().any(|&s| r.contains(&self.states[s]));
                !meets(a) || meets(b)
            })
            .collect()
    }

    /// Bottom SCCs reachable from the initial distribution.
    pub fn bsccs(&self, cond: &StreettCondition) -> Vec<Bscc> {
        let reachable = self.reachable_from_initial();
        self.all_bsccs()
            .into_iter()
            .filter(|members| reachable[members[0]])
            .map(|members| Bscc {
                accepting: self.flags(&members, cond),
                states: members.iter().map(|&s| self.states[s].clone()).collect(),
            })
            .collect()
    }

    /// `s ↦ P_s(τ_target < ∞)` for every state.
    pub fn reach_vector(&self, target: &Region) -> ProbabilityVector {
        self.vector(linear::reach_values(&self.rows, &self.mask(target)))
    }

    pub fn reach_probability(&self, target: &Region, from: &Distribution) -> Result<Probability, OracleError> {
        let h = linear::reach_values(&self.rows, &self.mask(target));
        Ok(self.weigh(&self.dist_indices(from)?, &h))
    }

    /// `s ↦ P_s(σ_target < ∞)` for every state.
    pub fn return_vector(&self, target: &Region) -> ProbabilityVector {
        let h = linear::reach_values(&self.rows, &self.mask(target));
        let values = self.rows.iter().map(|row| self.weigh(row, &h)).collect();
        self.vector(values)
    }

    pub fn return_probability(&self, target: &Region, from: &StateId) -> Result<Probability, OracleError> {
        let h = linear::reach_values(&self.rows, &self.mask(target));
        Ok(self.weigh(&self.rows[self.idx(from)?], &h))
    }

    fn accepting_mask(&self, cond: &StreettCondition) -> Vec<bool> {
        let mut mask = vec![false; self.states.len()];
        for members in self.all_bsccs() {
            if self.flags(&members, cond).iter().all(|&a| a) {
                for s in members {
                    mask[s] = true;
                }
            }
        }
        mask
    }

    /// `P_μ(⋂_i Fin(A_i) ∪ Inf(B_i))`.
    pub fn streett_probability(&self, cond: &StreettCondition) -> Probability {
        let h = linear::reach_values(&self.rows, &self.accepting_mask(cond));
        self.weigh(&self.initial, &h)
    }

    /// `s ↦ P_{δ_s}(L)` from a single solve.
    pub fn per_state_streett(&self, cond: &StreettCondition) -> ProbabilityVector {
        self.vector(linear::reach_values(&self.rows, &self.accepting_mask(cond)))
    }

    /// `inf_{s ∈ A} P_s(σ_B < ∞)` and whether it is positive. An empty `A`
    /// gives the vacuous infimum 1.
    pub fn check_orey(&self, a: &Region, b: &Region) -> (bool, Probability) {
        let ret = self.return_vector(b);
        let inf = ret
            .iter()
            .filter(|(s, _)| a.contains(s))
            .map(|(_, v)| v.clone())
            .min()
            .unwrap_or_else(Probability::one);
        (!inf.is_zero(), inf)
    }

    /// `P_μ(X^ω) = 1 − P_μ(τ_{X^c} < ∞)`.
    pub fn stay_probability(&self, x: &Region) -> Probability {
        let h = linear::reach_values(&self.rows, &self.mask(&x.complement()));
        Probability::one() - self.weigh(&self.initial, &h)
    }

    /// Expected steps to `target` per state, `None` where not reached surely.
    pub fn expected_steps(&self, target: &Region) -> Vec<(StateId, Option<Rational>)> {
        let e = linear::expected_steps(&self.rows, &self.mask(target));
        self.states.iter().cloned().zip(e).collect()
    }

    /// Graph distance to `target` per state.
    pub fn distances(&self, target: &Region) -> Vec<(StateId, Option<u64>)> {
        let d = linear::distances(&self.rows, &self.mask(target));
        self.states.iter().cloned().zip(d).collect()
    }

    /// Smallest positive transition probability.
    pub fn min_transition(&self) -> Rational {
        self.rows
            .iter()
            .flatten()
            .map(|(_, p)| p.clone())
            .min()
            .unwrap_or_else(Rational::one)
    }
}

/// One-shot `P_μ(L)` on a finite chain.
pub fn streett_probability(chain: &MarkovChain, cond: &StreettCondition) -> Result<Probability, OracleError> {
    Ok(Oracle::new(chain)?.streett_probability(cond))
}

/// One-shot `P_from(τ_target < ∞)` on a finite chain.
pub fn reach_probability(chain: &MarkovChain, target: &Region, from: &Distribution) -> Result<Probability, OracleError> {
    Oracle::new(chain)?.reach_probability(target, from)
}

/// One-shot `P_{δ_s}(σ_target < ∞)` on a finite chain.
pub fn return_probability(chain: &MarkovChain, target: &Region, from: &StateId) -> Result<Probability, OracleError> {
    Oracle::new(chain)?.return_probability(target, from)
}
