//! Constructive witnesses on finite chains: absorbing regions, invariants,
//! safety certificates, and full proof-rule bundles.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::certificate::{
    decomposition_with, CertError, DecompositionWitness, MonotoneScalarFunction, RankingFunction, Role,
    Rule1Bundle, Rule1Pair, Rule2Bundle, Rule2Pair, ValueFunction,
};
use crate::chain::{MarkovChain, Region, StateId};
use crate::omega::StreettCondition;
use crate::oracle::{Oracle, OracleError};
use crate::scalar::{int, rat, Probability, Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthesisError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Certificate(#[from] CertError),
    #[error("threshold {0} is not in (0,1)")]
    BadThreshold(Rational),
    #[error("state {0} in the invariant does not reach B ∪ J ∪ I^c almost surely")]
    NotTerminating(StateId),
}

/// `P_μ(L) < 1`: the almost-sure invariant is still returned, without the
/// guarantee that it carries all of the initial mass.
#[derive(Clone, Debug, PartialEq)]
pub struct NotAlmostSure {
    pub probability: Probability,
}

#[derive(Clone, Debug)]
pub struct AsInvariant {
    pub region: Region,
    pub warning: Option<NotAlmostSure>,
}

fn region_of(name: &str, states: impl IntoIterator<Item = StateId>) -> Region {
    Region::from_states(name, states)
}

/// `J = {s ∈ I ∖ A : P_s(σ_A < ∞) ≤ threshold}`.
pub fn synthesize_absorbing(
    chain: &MarkovChain,
    invariant: &Region,
    a: &Region,
    threshold: &Rational,
) -> Result<Region, SynthesisError> {
    absorbing_with(&Oracle::new(chain)?, invariant, a, threshold)
}

pub fn absorbing_with(
    oracle: &Oracle,
    invariant: &Region,
    a: &Region,
    threshold: &Rational,
) -> Result<Region, SynthesisError> {
    if !(threshold > &Rational::zero() && threshold < &Rational::one()) {
        return Err(SynthesisError::BadThreshold(threshold.clone()));
    }
    let returns = oracle.return_vector(a);
    Ok(region_of(
        "J",
        returns
            .into_iter()
            .filter(|(s, p)| invariant.contains(s) && !a.contains(s) && p <= threshold)
            .map(|(s, _)| s),
    ))
}

/// `I_k = {s : P_s(L) ≥ 1/(k+1)}`.
pub fn synthesize_invariant(chain: &MarkovChain, cond: &StreettCondition, k: u64) -> Result<Region, SynthesisError> {
    Ok(invariant_with(&Oracle::new(chain)?.per_state_streett(cond), k))
}

fn invariant_with(values: &BTreeMap<StateId, Probability>, k: u64) -> Region {
    let cut = Rational::new(1.into(), (k + 1).into());
    region_of(
        &format!("I_{k}"),
        values.iter().filter(|(_, p)| **p >= cut).map(|(s, _)| s.clone()),
    )
}

/// `I = {s : P_s(L) = 1}`.
pub fn synthesize_as_invariant(chain: &MarkovChain, cond: &StreettCondition) -> Result<AsInvariant, SynthesisError> {
    let oracle = Oracle::new(chain)?;
    let values = oracle.per_state_streett(cond);
    let total = oracle.streett_probability(cond);
    let region = region_of("I", values.into_iter().filter(|(_, p)| p.is_one()).map(|(s, _)| s));
    Ok(AsInvariant {
        region,
        warning: (!total.is_one()).then_some(NotAlmostSure { probability: total }),
    })
}

/// `V(s) = P_s(τ_{X^c} < ∞)`, so that `1 − μV = P_μ(X^ω)`.
pub fn witness_quant_safety(chain: &MarkovChain, x: &Region) -> Result<ValueFunction, SynthesisError> {
    let oracle = Oracle::new(chain)?;
    Ok(ValueFunction::exact_table(
        format!("leave({})", x.name()),
        oracle.reach_vector(&x.complement()),
    ))
}

/// `V(s) = P_s(τ_A < ∞)`.
pub fn witness_qual_safety(chain: &MarkovChain, a: &Region) -> Result<ValueFunction, SynthesisError> {
    let oracle = Oracle::new(chain)?;
    Ok(ValueFunction::exact_table(format!("reach({})", a.name()), oracle.reach_vector(a)))
}

/// Invariant plus one synthesized absorbing region per pair.
pub fn synthesize_decomposition(
    chain: &MarkovChain,
    cond: &StreettCondition,
    invariant: Region,
    threshold: &Rational,
) -> Result<DecompositionWitness, SynthesisError> {
    let oracle = Oracle::new(chain)?;
    let absorbing = cond
        .pairs()
        .iter()
        .enumerate()
        .map(|(i, (a, _))| Ok(absorbing_with(&oracle, &invariant, a, threshold)?.with_name(format!("J{}", i + 1))))
        .collect::<Result<Vec<_>, SynthesisError>>()?;
    Ok(DecompositionWitness { invariant, absorbing })
}

/// Outcome of the search for a decomposition within `ε` of the optimum.
#[derive(Clone, Debug)]
pub struct EpsSearch {
    pub k: u64,
    pub witness: DecompositionWitness,
    pub bound: Rational,
    pub probability: Probability,
    /// Bound of the decomposition built from the largest useful `k`, where `I_k`
    /// has stabilised.
    pub stabilized_bound: Rational,
}

/// Finds the least `k` whose invariant `I_k` with synthesized absorbing
/// regions passes the decomposition check with bound `≥ P_μ(L) − ε`.
///
/// `I_k` only changes at `k = ⌈1/v⌉ − 1` for the distinct positive per-state
/// values `v`, so only those breakpoints are tried. Returns `None` when no
/// breakpoint qualifies.
pub fn eps_complete_search(
    chain: &MarkovChain,
    cond: &StreettCondition,
    eps: &Rational,
    threshold: &Rational,
) -> Result<Option<EpsSearch>, SynthesisError> {
    let oracle = Oracle::new(chain)?;
    let values = oracle.per_state_streett(cond);
    let probability = oracle.streett_probability(cond);
    let mut ks: Vec<u64> = values
        .values()
        .filter(|v| !v.is_zero())
        .map(|v| {
            let inv = v.recip();
            let c = inv.ceil().to_integer();
            u64::try_from(c - num_bigint::BigInt::one()).unwrap_or(u64::MAX)
        })
        .collect();
    ks.sort_unstable();
    ks.dedup();
    let build = |k: u64| -> Result<(DecompositionWitness, Option<Rational>), SynthesisError> {
        let invariant = invariant_with(&values, k);
        let mut absorbing = Vec::new();
        for (i, (a, _)) in cond.pairs().iter().enumerate() {
            absorbing.push(absorbing_with(&oracle, &invariant, a, threshold)?.with_name(format!("J{}", i + 1)));
        }
        let witness = DecompositionWitness { invariant, absorbing };
        let report = decomposition_with(&oracle, cond, &witness)?;
        let bound = report.bound.as_ref().and_then(|b| b.as_exact().cloned());
        Ok((witness, bound))
    };
    let stabilized_bound = match ks.last() {
        Some(&k) => build(k)?.1.unwrap_or_else(Rational::zero),
        None => Rational::zero(),
    };
    for &k in &ks {
        let (witness, bound) = build(k)?;
        if let Some(bound) = bound {
            if bound >= &probability - eps {
                return Ok(Some(EpsSearch {
                    k,
                    witness,
                    bound,
                    probability,
                    stabilized_bound,
                }));
            }
        }
    }
    Ok(None)
}

/// Target `B_i ∪ J_i ∪ I^c` of the termination obligation.
fn termination_target(b: &Region, j: &Region, invariant: &Region) -> Region {
    b.union(j).union(&invariant.complement())
}

fn expected_time_certificate(
    oracle: &Oracle,
    target: &Region,
    invariant: &Region,
    pair: usize,
) -> Result<ValueFunction, SynthesisError> {
    let mut table = BTreeMap::new();
    for (s, e) in oracle.expected_steps(target) {
        match e {
            Some(v) => {
                table.insert(s, v);
            }
            None if invariant.contains(&s) => return Err(SynthesisError::NotTerminating(s)),
            None => {
                table.insert(s, Rational::zero());
            }
        }
    }
    Ok(ValueFunction::exact_table(format!("W{pair}"), table))
}

fn shared_parts(
    oracle: &Oracle,
    cond: &StreettCondition,
    witness: &DecompositionWitness,
) -> Result<(ValueFunction, Vec<(ValueFunction, ValueFunction, Region)>), SynthesisError> {
    let inv = &witness.invariant;
    let v0 = ValueFunction::exact_table("V0", oracle.reach_vector(&inv.complement()));
    let mut parts = Vec::new();
    for (i, ((a, b), j)) in cond.pairs().iter().zip(&witness.absorbing).enumerate() {
        let pair = i + 1;
        let v = ValueFunction::exact_table(format!("V{pair}"), oracle.reach_vector(a));
        let target = termination_target(b, j, inv);
        let w = expected_time_certificate(oracle, &target, inv, pair)?;
        parts.push((v, w, target));
    }
    Ok((v0, parts))
}

/// Ranking-function bundle: `V_i` reach probabilities of `A_i`, `W_i` the
/// expected time to `B_i ∪ J_i ∪ I^c`, `U_i` the graph distance to it, and
/// `V₀` the probability of leaving `I`.
pub fn synthesize_rule1(
    chain: &MarkovChain,
    cond: &StreettCondition,
    witness: &DecompositionWitness,
) -> Result<Rule1Bundle, SynthesisError> {
    let oracle = Oracle::new(chain)?;
    let (v0, parts) = shared_parts(&oracle, cond, witness)?;
    let pairs = parts
        .into_iter()
        .enumerate()
        .map(|(i, (v, w, target))| {
            let table: BTreeMap<StateId, u64> = oracle
                .distances(&target)
                .into_iter()
                .map(|(s, d)| (s, d.unwrap_or(0)))
                .collect();
            Rule1Pair {
                v,
                w,
                u: RankingFunction::table(format!("U{}", i + 1), table, None),
                gamma: None,
            }
        })
        .collect();
    Ok(Rule1Bundle {
        witness: witness.clone(),
        v0,
        pairs,
    })
}

/// Drift bundle: as [`synthesize_rule1`] with `d_i ≡ 1` and `p_i` the smallest
/// transition probability of the chain.
pub fn synthesize_rule2(
    chain: &MarkovChain,
    cond: &StreettCondition,
    witness: &DecompositionWitness,
) -> Result<Rule2Bundle, SynthesisError> {
    let oracle = Oracle::new(chain)?;
    let (v0, parts) = shared_parts(&oracle, cond, witness)?;
    let p = Scalar::Exact(oracle.min_transition());
    let pairs = parts
        .into_iter()
        .map(|(v, w, _)| Rule2Pair {
            v,
            w,
            d: MonotoneScalarFunction::constant(Role::Decrease, Scalar::Exact(int(1))),
            p: MonotoneScalarFunction::constant(Role::Probability, p.clone()),
            gamma: None,
        })
        .collect();
    Ok(Rule2Bundle {
        witness: witness.clone(),
        v0,
        pairs,
    })
}

/// Default threshold for absorbing-region synthesis.
pub fn default_threshold() -> Rational {
    rat(1, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{fig2, fig3, fig5};

    fn names(r: &Region) -> Vec<String> {
        r.enumeration().unwrap().iter().map(|s| s.to_string()).collect()
    }

    fn all() -> Region {
        Region::all()
    }

    #[test]
    fn absorbing_regions_of_fixtures() {
        let half = default_threshold();
        let j = synthesize_absorbing(&fig2(), &all(), &Region::named("A", ["s1", "s3"]), &half).unwrap();
        assert_eq!(names(&j), ["s4"]);
        let i5 = Region::named("I", ["s0", "s1", "s2", "s3", "s4", "s6"]);
        let j = synthesize_absorbing(&fig5(), &i5, &Region::named("A", ["s1", "s3", "s5"]), &half).unwrap();
        assert_eq!(names(&j), ["s2", "s4", "s6"]);
        let i3 = Region::named("I", ["s0", "s1", "s2", "s3", "s4"]);
        let j = synthesize_absorbing(&fig3(), &i3, &Region::named("A", ["s1", "s3", "s5"]), &half).unwrap();
        assert_eq!(names(&j), ["s4"]);
        assert!(matches!(
            synthesize_absorbing(&fig3(), &i3, &Region::empty(), &int(1)),
            Err(SynthesisError::BadThreshold(_))
        ));
    }

    fn cond(a: &[&str]) -> StreettCondition {
        StreettCondition::new(vec![(Region::named("A", a.iter().copied()), Region::named("B", ["s2"]))])
    }

    #[test]
    fn invariants_of_fixtures() {
        let i = synthesize_invariant(&fig5(), &cond(&["s1", "s3", "s5"]), 1).unwrap();
        assert_eq!(names(&i), ["s0", "s1", "s2", "s3", "s4", "s6"]);
        let i = synthesize_invariant(&fig3(), &cond(&["s1", "s3", "s5"]), 1).unwrap();
        assert_eq!(names(&i), ["s0", "s1", "s2", "s3", "s4"]);
        let i = synthesize_as_invariant(&fig2(), &cond(&["s1", "s3"])).unwrap();
        assert_eq!(names(&i.region), ["s0", "s1", "s2", "s3", "s4"]);
        assert!(i.warning.is_none());
        let i = synthesize_as_invariant(&fig3(), &cond(&["s1", "s3", "s5"])).unwrap();
        assert_eq!(names(&i.region), ["s1", "s2", "s3", "s4"]);
        assert_eq!(i.warning.unwrap().probability, rat(2, 3));
    }

    #[test]
    fn safety_witnesses_of_fixtures() {
        let x = Region::named("X", ["s0", "s1", "s2", "s3", "s4"]);
        let v = witness_quant_safety(&fig3(), &x).unwrap();
        let at = |v: &ValueFunction, s: &str| v.eval(&StateId::name(s)).unwrap();
        assert_eq!(at(&v, "s0"), Scalar::Exact(rat(1, 3)));
        assert_eq!(at(&v, "s5"), Scalar::one());
        assert_eq!(at(&v, "s2"), Scalar::zero());
        let v = witness_quant_safety(&fig3(), &all()).unwrap();
        assert!(fig3().states().unwrap().iter().all(|s| v.eval(s).unwrap() == Scalar::zero()));

        let v = witness_qual_safety(&fig5(), &Region::named("A", ["s1", "s3", "s5"])).unwrap();
        assert_eq!(at(&v, "s6"), Scalar::Exact(rat(1, 2)));
        assert_eq!(at(&v, "s2"), Scalar::zero());
        assert_eq!(at(&v, "s4"), Scalar::zero());
        assert_eq!(at(&v, "s0"), Scalar::one());
        assert_eq!(at(&v, "s3"), Scalar::one());
        let v = witness_qual_safety(&fig5(), &all()).unwrap();
        assert!(fig5().states().unwrap().iter().all(|s| v.eval(s).unwrap() == Scalar::one()));
    }

    #[test]
    fn eps_search_on_fig3() {
        let c = cond(&["s1", "s3", "s5"]);
        let found = eps_complete_search(&fig3(), &c, &rat(1, 100), &default_threshold())
            .unwrap()
            .unwrap();
        assert_eq!(found.probability, rat(2, 3));
        assert_eq!(found.bound, rat(2, 3));
        assert_eq!(found.stabilized_bound, rat(2, 3));
    }
}
