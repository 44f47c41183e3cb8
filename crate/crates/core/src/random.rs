//! Seeded generator of small random finite chains and Streett conditions,
//! used by the property tests and the acceptance suite.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::chain::{Distribution, MarkovChain, Region, StateId};
use crate::omega::StreettCondition;
use crate::scalar::rat;

#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub chain: MarkovChain,
    pub condition: StreettCondition,
}

/// Shape limits for [`random_instance`].
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_states: usize,
    pub max_pairs: usize,
    pub max_successors: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_states: 12,
            max_pairs: 2,
            max_successors: 3,
        }
    }
}

fn state(i: usize) -> StateId {
    StateId::name(format!("s{i}"))
}

/// Random chain on `s0..s{n-1}` started in `s0`; transition weights are small
/// integers, so every probability has a small denominator.
pub fn random_chain(rng: &mut impl Rng, shape: Shape) -> MarkovChain {
    let n = rng.random_range(1..=shape.max_states);
    let rows = (0..n).map(|i| {
        let k = rng.random_range(1..=shape.max_successors.min(n));
        let succ = sample(rng, n, k);
        let weights: Vec<i64> = (0..k).map(|_| rng.random_range(1..=4)).collect();
        let total: i64 = weights.iter().sum();
        let dist = Distribution::new(succ.iter().zip(&weights).map(|(j, &w)| (state(j), rat(w, total))))
            .expect("weights are normalised");
        (state(i), dist)
    });
    let rows: Vec<_> = rows.collect();
    MarkovChain::explicit(Distribution::dirac(state(0)), rows).expect("successors are in range")
}

/// Each state joins `A_i` with probability 1/3 and `B_i` with probability 1/4.
pub fn random_condition(rng: &mut impl Rng, states: &[StateId], max_pairs: usize) -> StreettCondition {
    let pairs = rng.random_range(0..=max_pairs);
    let mut cond = StreettCondition::empty();
    for i in 1..=pairs {
        let a: Vec<StateId> = states.iter().filter(|_| rng.random_bool(1.0 / 3.0)).cloned().collect();
        let b: Vec<StateId> = states.iter().filter(|_| rng.random_bool(0.25)).cloned().collect();
        cond = cond.with_pair(Region::from_states(format!("A{i}"), a), Region::from_states(format!("B{i}"), b));
    }
    cond
}

/// Instance number `index` of the stream for `seed`.
pub fn random_instance(seed: u64, index: u64, shape: Shape) -> RandomInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let chain = random_chain(&mut rng, shape);
    let states = chain.states().expect("explicit chain").to_vec();
    let condition = random_condition(&mut rng, &states, shape.max_pairs);
    RandomInstance { chain, condition }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_respect_shape_and_are_reproducible() {
        for i in 0..50 {
            let x = random_instance(7, i, Shape::default());
            let y = random_instance(7, i, Shape::default());
            let states = x.chain.states().unwrap();
            assert!(!states.is_empty() && states.len() <= 12);
            assert!(x.condition.len() <= 2);
            assert_eq!(states, y.chain.states().unwrap());
            for s in states {
                assert_eq!(x.chain.successors(s).unwrap(), y.chain.successors(s).unwrap());
            }
        }
    }
}
