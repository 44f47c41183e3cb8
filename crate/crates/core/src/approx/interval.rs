use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::ApproxError;
use crate::certificate::ValueFunction;
use crate::chain::{Distribution, MarkovChain, Region, StateId};
use crate::oracle::linear;
use crate::scalar::{Rational, Scalar};

/// Certified bracket `lower ≤ p ≤ upper` of a probability.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbabilityInterval {
    #[serde(with = "crate::scalar::rational_text")]
    pub lower: Rational,
    #[serde(with = "crate::scalar::rational_text")]
    pub upper: Rational,
}

impl ProbabilityInterval {
    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    pub fn contains(&self, p: &Rational) -> bool {
        &self.lower <= p && p <= &self.upper
    }
}

/// Truncated chain over `window` plus two sinks for leaving it.
struct Truncation {
    rows: linear::Rows,
    target: Vec<bool>,
    from: Vec<(usize, Rational)>,
}

const HIT: usize = 0;
const MISS: usize = 1;

impl Truncation {
    /// Window states occupy indices `2..`; a step leaving the window goes to
    /// `HIT` if it lands in the target, otherwise it is split between `HIT`
    /// and `MISS` by `exit_value`.
    fn build(
        chain: &MarkovChain,
        target: &Region,
        window: &[StateId],
        from: &Distribution,
        exit_value: &dyn Fn(&StateId) -> Result<Rational, ApproxError>,
    ) -> Result<Self, ApproxError> {
        let index: HashMap<&StateId, usize> = window.iter().enumerate().map(|(i, s)| (s, i + 2)).collect();
        let n = window.len() + 2;
        let mut rows: linear::Rows = vec![Vec::new(); n];
        rows[HIT].push((HIT, Rational::one()));
        rows[MISS].push((MISS, Rational::one()));
        let mut target_mask = vec![false; n];
        target_mask[HIT] = true;
        for (i, s) in window.iter().enumerate() {
            let k = i + 2;
            if target.contains(s) {
                target_mask[k] = true;
                rows[k].push((k, Rational::one()));
                continue;
            }
            let mut hit = Rational::zero();
            let mut miss = Rational::zero();
            for (u, p) in chain.successors(s)?.iter() {
                if let Some(&j) = index.get(u) {
                    rows[k].push((j, p.clone()));
                } else if target.contains(u) {
                    hit += p;
                } else {
                    let v = exit_value(u)?;
                    miss += p * (Rational::one() - &v);
                    hit += p * v;
                }
            }
            for (sink, mass) in [(HIT, hit), (MISS, miss)] {
                if !mass.is_zero() {
                    rows[k].push((sink, mass));
                }
            }
        }
        let from = from
            .iter()
            .map(|(s, p)| {
                index
                    .get(s)
                    .map(|&i| (i, p.clone()))
                    .ok_or_else(|| ApproxError::WindowNotClosed(s.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Truncation {
            rows,
            target: target_mask,
            from,
        })
    }

    fn solve(&self) -> Rational {
        let h = linear::reach_values(&self.rows, &self.target);
        self.from.iter().map(|(i, p)| p * &h[*i]).sum()
    }
}

/// Brackets `P_from(τ_target < ∞)` by solving the chain truncated to
/// `window` twice: leaving the window counts as failure for the lower bound
/// and as success for the upper bound.
pub fn bounded_reach_interval(
    chain: &MarkovChain,
    target: &Region,
    window: &[StateId],
    from: &Distribution,
) -> Result<ProbabilityInterval, ApproxError> {
    let lower = Truncation::build(chain, target, window, from, &|_| Ok(Rational::zero()))?.solve();
    let upper = Truncation::build(chain, target, window, from, &|_| Ok(Rational::one()))?.solve();
    Ok(ProbabilityInterval { lower, upper })
}

/// As [`bounded_reach_interval`], but a state outside the window is valued by
/// `majorant` (capped at 1) in the upper bound.
///
/// The majorant must dominate the true hitting probability; this holds when
/// `PV ≤ V` off the target and `V ≥ 1` on it everywhere, which is verified
/// here on the window and its one-step boundary.
pub fn bounded_reach_interval_with_majorant(
    chain: &MarkovChain,
    target: &Region,
    window: &[StateId],
    from: &Distribution,
    majorant: &ValueFunction,
) -> Result<ProbabilityInterval, ApproxError> {
    let exact = |s: &StateId| -> Result<Rational, ApproxError> {
        match majorant.eval(s)? {
            Scalar::Exact(v) => Ok(v),
            Scalar::Approx(_) => Err(ApproxError::InexactMajorant(s.clone())),
        }
    };
    for s in window {
        let v = exact(s)?;
        if target.contains(s) {
            if v < Rational::one() {
                return Err(ApproxError::InvalidMajorant(s.clone()));
            }
            continue;
        }
        let mut pv = Rational::zero();
        for (u, p) in chain.successors(s)?.iter() {
            pv += p * exact(u)?;
        }
        if pv > v {
            return Err(ApproxError::InvalidMajorant(s.clone()));
        }
    }
    let capped = |s: &StateId| exact(s).map(|v| v.min(Rational::one()));
    let lower = Truncation::build(chain, target, window, from, &|_| Ok(Rational::zero()))?.solve();
    let upper = Truncation::build(chain, target, window, from, &capped)?.solve();
    Ok(ProbabilityInterval { lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::casino::v1;
    use crate::families::{fig5, lending_casino};
    use crate::oracle::Oracle;
    use crate::scalar::rat;

    fn window(lo: i64, hi: i64) -> Vec<StateId> {
        (lo..=hi).map(StateId::Int).collect()
    }

    #[test]
    fn target_covering_window_gives_one() {
        let c = lending_casino(rat(1, 5)).unwrap();
        let i = bounded_reach_interval(&c, &Region::all(), &window(-2, 2), &Distribution::dirac(StateId::Int(0)))
            .unwrap();
        assert_eq!((i.lower, i.upper), (rat(1, 1), rat(1, 1)));
    }

    #[test]
    fn casino_brackets_closed_form() {
        let c = lending_casino(rat(1, 5)).unwrap();
        let solvency = Region::int_at_least("Solvency", 0);
        let from = Distribution::dirac(StateId::Int(-1));
        for n in [2, 5, 10] {
            let plain = bounded_reach_interval(&c, &solvency, &window(-n, 1), &from).unwrap();
            assert!(plain.contains(&rat(2, 3)));
            let tight = bounded_reach_interval_with_majorant(&c, &solvency, &window(-n, 1), &from, &v1(rat(1, 5)))
                .unwrap();
            assert!(tight.contains(&rat(2, 3)));
            assert_eq!(tight.upper, rat(2, 3));
            assert_eq!(tight.lower, plain.lower);
        }
    }

    #[test]
    fn unreachable_target_gives_zero_lower() {
        let c = lending_casino(rat(1, 5)).unwrap();
        let far = Region::int_at_least("Far", 100);
        let i = bounded_reach_interval(&c, &far, &window(-3, 3), &Distribution::dirac(StateId::Int(0))).unwrap();
        assert_eq!(i.lower, rat(0, 1));
        assert!(i.upper > rat(0, 1));
    }

    #[test]
    fn brackets_exact_value_on_finite_chain() {
        let chain = fig5();
        let a = Region::named("A", ["s1", "s3", "s5"]);
        let from = Distribution::dirac(StateId::name("s6"));
        let exact = Oracle::new(&chain).unwrap().reach_probability(&a, &from).unwrap();
        let all: Vec<StateId> = chain.states().unwrap().to_vec();
        let i = bounded_reach_interval(&chain, &a, &all, &from).unwrap();
        assert_eq!((i.lower.clone(), i.upper.clone()), (exact.clone(), exact));
    }

    #[test]
    fn window_must_hold_initial_support() {
        let c = lending_casino(rat(1, 5)).unwrap();
        let err = bounded_reach_interval(&c, &Region::all(), &window(0, 1), &Distribution::dirac(StateId::Int(-4)));
        assert!(matches!(err, Err(ApproxError::WindowNotClosed(_))));
    }

    #[test]
    fn invalid_majorant_rejected() {
        let c = lending_casino(rat(1, 5)).unwrap();
        let solvency = Region::int_at_least("Solvency", 0);
        let half = ValueFunction::constant("1/2", Scalar::Exact(rat(1, 2)));
        let err = bounded_reach_interval_with_majorant(
            &c,
            &solvency,
            &window(-3, 1),
            &Distribution::dirac(StateId::Int(-1)),
            &half,
        );
        assert!(matches!(err, Err(ApproxError::InvalidMajorant(_))));
    }
}
