//! Built-in chains: the generated integer families and the small example
//! chains used throughout the tests.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::chain::{
    ChainError, Distribution, Kernel, Labeling, MarkovChain, Region, StateId, Universe,
};
use crate::omega::StreettCondition;
use crate::scalar::{int, parse_rational, rat, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("unknown builtin family {0:?}")]
    UnknownFamily(String),
    #[error("bad parameter {name}: {reason}")]
    BadParameter { name: String, reason: String },
}

/// A built-in chain with its named regions and default Streett condition.
#[derive(Clone, Debug)]
pub struct Builtin {
    pub chain: MarkovChain,
    pub regions: BTreeMap<String, Region>,
    pub streett: StreettCondition,
}

pub const FAMILIES: [&str; 6] = [
    "lending-casino",
    "biased-walk",
    "truncated-casino",
    "fig2",
    "fig3",
    "fig5",
];

/// Looks up a family by name. Parameters are given as text, e.g. `eps = "1/5"`.
pub fn builtin(name: &str, params: &BTreeMap<String, String>) -> Result<Builtin, FamilyError> {
    match name {
        "lending-casino" => {
            let eps = rational_param(params, "eps", None)?;
            let chain = lending_casino(eps)?;
            Ok(Builtin {
                chain,
                regions: casino_regions(),
                streett: casino_condition(),
            })
        }
        "biased-walk" => {
            let p = rational_param(params, "p", None)?;
            Ok(Builtin {
                chain: biased_walk(p)?,
                regions: casino_regions(),
                streett: StreettCondition::empty(),
            })
        }
        "truncated-casino" => {
            let eps = rational_param(params, "eps", None)?;
            let lo = int_param(params, "lo")?;
            let hi = int_param(params, "hi")?;
            let start = match params.get("start") {
                Some(_) => int_param(params, "start")?,
                None => 1.clamp(lo, hi),
            };
            Ok(Builtin {
                chain: truncated_casino(eps, lo, hi, start)?,
                regions: casino_regions(),
                streett: casino_condition(),
            })
        }
        "fig2" | "fig3" | "fig5" => {
            if let Some(extra) = params.keys().next() {
                return Err(FamilyError::BadParameter {
                    name: extra.clone(),
                    reason: format!("{name} takes no parameters"),
                });
            }
            let chain = match name {
                "fig2" => fig2(),
                "fig3" => fig3(),
                _ => fig5(),
            };
            let (a, b) = if name == "fig2" {
                (Region::named("A", ["s1", "s3"]), Region::named("B", ["s2"]))
            } else {
                (Region::named("A", ["s1", "s3", "s5"]), Region::named("B", ["s2"]))
            };
            let regions = [("A".to_string(), a.clone()), ("B".to_string(), b.clone())].into();
            Ok(Builtin {
                chain,
                regions,
                streett: StreettCondition::new(vec![(a, b)]),
            })
        }
        other => Err(FamilyError::UnknownFamily(other.to_string())),
    }
}

fn rational_param(
    params: &BTreeMap<String, String>,
    name: &str,
    default: Option<Rational>,
) -> Result<Rational, FamilyError> {
    match (params.get(name), default) {
        (Some(text), _) => parse_rational(text).map_err(|reason| FamilyError::BadParameter {
            name: name.to_string(),
            reason,
        }),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(FamilyError::BadParameter {
            name: name.to_string(),
            reason: "missing".to_string(),
        }),
    }
}

fn int_param(params: &BTreeMap<String, String>, name: &str) -> Result<i64, FamilyError> {
    let text = params.get(name).ok_or_else(|| FamilyError::BadParameter {
        name: name.to_string(),
        reason: "missing".to_string(),
    })?;
    text.trim().parse().map_err(|e| FamilyError::BadParameter {
        name: name.to_string(),
        reason: format!("{e}"),
    })
}

fn open_unit(name: &str, value: &Rational) -> Result<(), FamilyError> {
    if value.is_positive() && value < &Rational::one() {
        Ok(())
    } else {
        Err(FamilyError::BadParameter {
            name: name.to_string(),
            reason: format!("{value} is not in (0,1)"),
        })
    }
}

/// Integer walk moving up with probability `up(w)` and down otherwise.
struct WalkKernel {
    up_solvent: Rational,
    up_debt: Rational,
    universe: Universe,
}

impl Kernel for WalkKernel {
    fn successors(&self, state: &StateId) -> Result<Distribution, ChainError> {
        let w = state
            .as_int()
            .ok_or_else(|| ChainError::StateOutsideUniverse(state.clone()))?;
        let up = if w >= 0 { &self.up_solvent } else { &self.up_debt };
        step(w, up)
    }

    fn universe(&self) -> &Universe {
        &self.universe
    }
}

fn step(w: i64, up: &Rational) -> Result<Distribution, ChainError> {
    let down = Rational::one() - up;
    Distribution::new([(StateId::Int(w + 1), up.clone()), (StateId::Int(w - 1), down)])
}

fn int_labeling() -> Labeling {
    Labeling::new(|s| {
        let mut props = BTreeSet::new();
        if let Some(w) = s.as_int() {
            if w > 0 {
                props.insert("profit".to_string());
            }
            if w >= 0 {
                props.insert("solvency".to_string());
            } else {
                props.insert("debt".to_string());
            }
        }
        props
    })
}

/// The lending casino: fair steps on `w >= 0`, up-probability `(1-ε)/2` on
/// `w < 0`, started with one unit of wealth.
pub fn lending_casino(eps: Rational) -> Result<MarkovChain, FamilyError> {
    open_unit("eps", &eps)?;
    let kernel = WalkKernel {
        up_solvent: rat(1, 2),
        up_debt: (Rational::one() - &eps) / int(2),
        universe: Universe::Generated {
            family: "lending-casino".into(),
            params: vec![("eps".into(), eps.to_string())],
        },
    };
    let chain = MarkovChain::new(Distribution::dirac(StateId::Int(1)), Arc::new(kernel))
        .expect("generated universe accepts integer states");
    Ok(chain.with_labeling(int_labeling()))
}

/// Walk on ℤ stepping up with probability `p` everywhere, started at 0.
pub fn biased_walk(p: Rational) -> Result<MarkovChain, FamilyError> {
    open_unit("p", &p)?;
    let kernel = WalkKernel {
        up_solvent: p.clone(),
        up_debt: p.clone(),
        universe: Universe::Generated {
            family: "biased-walk".into(),
            params: vec![("p".into(), p.to_string())],
        },
    };
    let chain = MarkovChain::new(Distribution::dirac(StateId::Int(0)), Arc::new(kernel))
        .expect("generated universe accepts integer states");
    Ok(chain.with_labeling(int_labeling()))
}

/// Finite casino on `[lo, hi]` whose two end states are absorbing.
pub fn truncated_casino(eps: Rational, lo: i64, hi: i64, start: i64) -> Result<MarkovChain, FamilyError> {
    open_unit("eps", &eps)?;
    if lo >= hi {
        return Err(FamilyError::BadParameter {
            name: "lo".into(),
            reason: format!("window [{lo}, {hi}] needs at least two states"),
        });
    }
    if !(lo..=hi).contains(&start) {
        return Err(FamilyError::BadParameter {
            name: "start".into(),
            reason: format!("{start} is outside [{lo}, {hi}]"),
        });
    }
    let up_debt = (Rational::one() - &eps) / int(2);
    let half = rat(1, 2);
    let rows = (lo..=hi).map(|w| {
        let row = if w == lo || w == hi {
            Distribution::dirac(StateId::Int(w))
        } else {
            step(w, if w >= 0 { &half } else { &up_debt }).expect("valid walk row")
        };
        (StateId::Int(w), row)
    });
    let chain = MarkovChain::explicit(Distribution::dirac(StateId::Int(start)), rows)
        .expect("rows stay inside the window");
    Ok(chain.with_labeling(int_labeling()))
}

/// `Profit`, `Solvency` and `Debt` on integer states.
pub fn casino_regions() -> BTreeMap<String, Region> {
    [
        ("Profit".to_string(), Region::int_at_least("Profit", 1)),
        ("Solvency".to_string(), Region::int_at_least("Solvency", 0)),
        ("Debt".to_string(), Region::int_below("Debt", 0)),
    ]
    .into()
}

/// `Fin(Solvency)`: the single pair `(Solvency, ∅)`.
pub fn casino_condition() -> StreettCondition {
    StreettCondition::new(vec![(Region::int_at_least("Solvency", 0), Region::empty())])
}

fn explicit(edges: &[(&str, &[(&str, (i64, i64))])], labels: &[(&str, &str)]) -> MarkovChain {
    let rows = edges.iter().map(|(s, succ)| {
        let dist = Distribution::new(succ.iter().map(|(u, (n, d))| (StateId::name(*u), rat(*n, *d))))
            .expect("fixture rows are normalised");
        (StateId::name(*s), dist)
    });
    let chain = MarkovChain::explicit(Distribution::dirac(StateId::name("s0")), rows)
        .expect("fixture rows are closed");
    let mut table: BTreeMap<StateId, BTreeSet<String>> = BTreeMap::new();
    for (s, prop) in labels {
        table.entry(StateId::name(*s)).or_default().insert(prop.to_string());
    }
    chain.with_labeling(Labeling::from_table(table))
}

/// Five states; `s0` splits between the `s1`/`s2` loop and the `s3 → s4` sink.
pub fn fig2() -> MarkovChain {
    explicit(
        &[
            ("s0", &[("s1", (1, 2)), ("s3", (1, 2))]),
            ("s1", &[("s2", (1, 1))]),
            ("s2", &[("s1", (1, 1))]),
            ("s3", &[("s4", (1, 1))]),
            ("s4", &[("s4", (1, 1))]),
        ],
        &[("s1", "a"), ("s2", "b"), ("s3", "a")],
    )
}

/// Like [`fig2`] with a third branch into the absorbing `A`-state `s5`.
pub fn fig3() -> MarkovChain {
    explicit(
        &[
            ("s0", &[("s1", (1, 3)), ("s3", (1, 3)), ("s5", (1, 3))]),
            ("s1", &[("s2", (1, 1))]),
            ("s2", &[("s1", (1, 1))]),
            ("s3", &[("s4", (1, 1))]),
            ("s4", &[("s4", (1, 1))]),
            ("s5", &[("s5", (1, 1))]),
        ],
        &[("s1", "a"), ("s2", "b"), ("s3", "a"), ("s5", "a")],
    )
}

/// Seven states; `s1` and `s6` alternate until `s6` escapes to the absorbing `s2`.
pub fn fig5() -> MarkovChain {
    explicit(
        &[
            ("s0", &[("s1", (1, 3)), ("s3", (1, 3)), ("s5", (1, 3))]),
            ("s1", &[("s6", (1, 1))]),
            ("s2", &[("s2", (1, 1))]),
            ("s3", &[("s4", (1, 1))]),
            ("s4", &[("s4", (1, 1))]),
            ("s5", &[("s5", (1, 1))]),
            ("s6", &[("s1", (1, 2)), ("s2", (1, 2))]),
        ],
        &[("s1", "a"), ("s2", "b"), ("s3", "a"), ("s5", "a")],
    )
}

/// `((1-ε)/(1+ε))^{|w|}` on `Debt` and 1 on `Solvency`: the probability of
/// returning to `Solvency`, exact.
pub fn casino_return_probability(eps: &Rational, w: i64) -> Rational {
    if w >= 0 {
        return Rational::one();
    }
    // (1-ε)/(1+ε) is reduced, so its powers are too: skip the gcd.
    let q = (Rational::one() - eps) / (Rational::one() + eps);
    let k = u32::try_from(w.unsigned_abs()).expect("debt depth fits in u32");
    Rational::new_raw(q.numer().pow(k), q.denom().pow(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn casino_rows_match_figure() {
        let c = lending_casino(rat(1, 5)).unwrap();
        let d = c.successors(&StateId::Int(-1)).unwrap();
        assert_eq!(d.prob(&StateId::Int(0)), rat(2, 5));
        assert_eq!(d.prob(&StateId::Int(-2)), rat(3, 5));
        let d = c.successors(&StateId::Int(3)).unwrap();
        assert_eq!(d.prob(&StateId::Int(4)), rat(1, 2));
        assert_eq!(d.prob(&StateId::Int(2)), rat(1, 2));
        assert_eq!(c.initial(), &Distribution::dirac(StateId::Int(1)));
        assert!(!c.is_finite());
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(matches!(lending_casino(rat(0, 1)), Err(FamilyError::BadParameter { .. })));
        assert!(matches!(lending_casino(rat(1, 1)), Err(FamilyError::BadParameter { .. })));
        let params = BTreeMap::new();
        assert!(matches!(builtin("nope", &params), Err(FamilyError::UnknownFamily(_))));
        assert!(matches!(builtin("lending-casino", &params), Err(FamilyError::BadParameter { .. })));
    }

    #[test]
    fn casino_labels() {
        let c = lending_casino(rat(1, 5)).unwrap();
        let l = c.labeling().unwrap();
        assert!(l.label(&StateId::Int(-2)).contains("debt"));
        assert!(l.label(&StateId::Int(0)).contains("solvency"));
        assert!(!l.label(&StateId::Int(0)).contains("profit"));
    }

    #[test]
    fn truncated_casino_is_finite_and_absorbing_at_ends() {
        let c = truncated_casino(rat(1, 5), -3, 2, 1).unwrap();
        assert_eq!(c.states().unwrap().len(), 6);
        assert_eq!(c.successors(&StateId::Int(-3)).unwrap(), Distribution::dirac(StateId::Int(-3)));
    }

    #[test]
    fn closed_form_return_probability() {
        assert_eq!(casino_return_probability(&rat(1, 5), -1), rat(2, 3));
        assert_eq!(casino_return_probability(&rat(1, 5), -2), rat(4, 9));
        assert_eq!(casino_return_probability(&rat(1, 5), 4), rat(1, 1));
    }
}
