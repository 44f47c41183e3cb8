use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ChainError, Distribution, MarkovChain, Region, StateId};
use crate::scalar::rational_to_f64;

/// First index at which a trajectory prefix meets a region, or [`HittingTime::NotHit`]
/// when the prefix never does.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HittingTime {
    At(usize),
    NotHit,
}

impl HittingTime {
    pub fn index(self) -> Option<usize> {
        match self {
            HittingTime::At(n) => Some(n),
            HittingTime::NotHit => None,
        }
    }

    pub fn is_hit(self) -> bool {
        matches!(self, HittingTime::At(_))
    }
}

/// Finite prefix of a run, with the `(seed, index)` it was sampled from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    states: Vec<StateId>,
    provenance: Option<(u64, u64)>,
}

impl Trajectory {
    pub fn new(states: Vec<StateId>) -> Self {
        Trajectory {
            states,
            provenance: None,
        }
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `(seed, index)` when the trajectory came from [`sample_trajectory`].
    pub fn provenance(&self) -> Option<(u64, u64)> {
        self.provenance
    }

    pub fn first_hitting_time(&self, target: &Region) -> HittingTime {
        self.states
            .iter()
            .position(|s| target.contains(s))
            .map_or(HittingTime::NotHit, HittingTime::At)
    }

    /// Least index `n >= 1` with the state in `target`.
    pub fn first_return_time(&self, target: &Region) -> HittingTime {
        self.states
            .iter()
            .skip(1)
            .position(|s| target.contains(s))
            .map_or(HittingTime::NotHit, |n| HittingTime::At(n + 1))
    }

    /// Drops the first `n` states.
    pub fn shift(&self, n: usize) -> Result<Trajectory, ChainError> {
        if n > 0 && n >= self.states.len() {
            return Err(ChainError::IndexOutOfRange {
                index: n,
                len: self.states.len(),
            });
        }
        Ok(Trajectory {
            states: self.states[n..].to_vec(),
            provenance: None,
        })
    }

    /// Checks that every step has positive kernel probability.
    pub fn is_consistent_with(&self, chain: &MarkovChain) -> Result<bool, ChainError> {
        for w in self.states.windows(2) {
            if chain.successors(&w[0])?.prob(&w[1]) == num_traits::Zero::zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Random stream for trajectory `index` under `seed`.
///
/// ChaCha is counter based: the seed selects the key and the index selects the
/// stream, so trajectories can be generated in any order or in parallel.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Walks a chain on interned state indices, caching each visited row as a
/// cumulative binary64 table so that long runs avoid rational arithmetic.
pub(crate) struct Sampler<'a> {
    chain: &'a MarkovChain,
    index: HashMap<StateId, usize>,
    states: Vec<StateId>,
    rows: Vec<Option<Row>>,
    initial: Row,
}

struct Row {
    targets: Vec<usize>,
    cumulative: Vec<f64>,
}

impl<'a> Sampler<'a> {
    pub(crate) fn new(chain: &'a MarkovChain) -> Self {
        let mut sampler = Sampler {
            chain,
            index: HashMap::new(),
            states: Vec::new(),
            rows: Vec::new(),
            initial: Row {
                targets: Vec::new(),
                cumulative: Vec::new(),
            },
        };
        sampler.initial = sampler.row_of(chain.initial());
        sampler
    }

    fn intern(&mut self, state: &StateId) -> usize {
        if let Some(&i) = self.index.get(state) {
            return i;
        }
        let i = self.states.len();
        self.states.push(state.clone());
        self.rows.push(None);
        self.index.insert(state.clone(), i);
        i
    }

    fn row_of(&mut self, dist: &Distribution) -> Row {
        let mut acc = 0.0;
        let mut targets = Vec::with_capacity(dist.len());
        let mut cumulative = Vec::with_capacity(dist.len());
        for (s, p) in dist.iter() {
            acc += rational_to_f64(p);
            targets.push(self.intern(s));
            cumulative.push(acc);
        }
        Row { targets, cumulative }
    }

    pub(crate) fn state(&self, i: usize) -> &StateId {
        &self.states[i]
    }

    pub(crate) fn start(&mut self, rng: &mut impl Rng) -> usize {
        pick(&self.initial, rng.random())
    }

    pub(crate) fn step(&mut self, i: usize, rng: &mut impl Rng) -> Result<usize, ChainError> {
        if self.rows[i].is_none() {
            let dist = self.chain.successors(&self.states[i])?;
            let row = self.row_of(&dist);
            self.rows[i] = Some(row);
        }
        let row = self.rows[i].as_ref().expect("row cached above");
        Ok(pick(row, rng.random()))
    }
}

fn pick(row: &Row, u: f64) -> usize {
    let k = row.cumulative.iter().position(|&c| u < c).unwrap_or(row.targets.len() - 1);
    row.targets[k]
}

/// Samples `length` states: the first from the initial distribution, the rest
/// from the kernel. Fully determined by `(seed, index)`.
pub fn sample_trajectory(
    chain: &MarkovChain,
    length: usize,
    seed: u64,
    index: u64,
) -> Result<Trajectory, ChainError> {
    if length == 0 {
        return Err(ChainError::InvalidLength);
    }
    let mut rng = trajectory_rng(seed, index);
    let mut sampler = Sampler::new(chain);
    let mut states = Vec::with_capacity(length);
    let mut current = sampler.start(&mut rng);
    states.push(sampler.state(current).clone());
    for _ in 1..length {
        current = sampler.step(current, &mut rng)?;
        states.push(sampler.state(current).clone());
    }
    Ok(Trajectory {
        states,
        provenance: Some((seed, index)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(states: &[&str]) -> Trajectory {
        Trajectory::new(states.iter().map(|s| StateId::name(*s)).collect())
    }

    #[test]
    fn hitting_times() {
        let t = named(&["s0", "s1", "s2"]);
        assert_eq!(t.first_hitting_time(&Region::named("T", ["s0"])), HittingTime::At(0));
        assert_eq!(t.first_hitting_time(&Region::named("T", ["s2"])), HittingTime::At(2));
        assert_eq!(t.first_hitting_time(&Region::named("T", ["s4"])), HittingTime::NotHit);
    }

    #[test]
    fn return_times() {
        let s0 = Region::named("T", ["s0"]);
        assert_eq!(named(&["s0", "s1", "s0"]).first_return_time(&s0), HittingTime::At(2));
        assert_eq!(named(&["s0", "s1", "s2"]).first_return_time(&s0), HittingTime::NotHit);
        let casino = Trajectory::new(vec![StateId::Int(0), StateId::Int(-1), StateId::Int(0)]);
        let solvency = Region::int_at_least("Solvency", 0);
        assert_eq!(casino.first_return_time(&solvency), HittingTime::At(2));
    }

    #[test]
    fn shift_drops_prefix() {
        let t = named(&["a", "b", "c"]);
        assert_eq!(t.shift(1).unwrap(), named(&["b", "c"]));
        assert_eq!(t.shift(0).unwrap(), t);
        assert!(matches!(t.shift(3), Err(ChainError::IndexOutOfRange { index: 3, len: 3 })));
    }

    #[test]
    fn return_time_is_one_plus_shifted_hitting_time() {
        let t = named(&["s0", "s1", "s2", "s0", "s1"]);
        for target in ["s0", "s1", "s2", "s9"] {
            let r = Region::named("T", [target]);
            let lhs = t.first_return_time(&r);
            let rhs = t.shift(1).unwrap().first_hitting_time(&r);
            assert_eq!(lhs.index(), rhs.index().map(|n| n + 1));
        }
    }
}
