use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::chain::{Region, StateId};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("cannot evaluate {function} at {state}: {reason}")]
pub struct EvaluationError {
    pub function: String,
    pub state: String,
    pub reason: String,
}

type Evaluator<T> = Arc<dyn Fn(&StateId) -> Result<T, EvaluationError> + Send + Sync>;

/// Non-negative certificate `V : S → ℝ≥0`, exact where possible.
#[derive(Clone)]
pub struct ValueFunction {
    name: String,
    eval: Evaluator<Scalar>,
}

impl ValueFunction {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&StateId) -> Result<Scalar, EvaluationError> + Send + Sync + 'static,
    ) -> Self {
        ValueFunction {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    /// Total function from a closure that cannot fail.
    pub fn from_fn(name: impl Into<String>, f: impl Fn(&StateId) -> Scalar + Send + Sync + 'static) -> Self {
        Self::new(name, move |s| Ok(f(s)))
    }

    pub fn constant(name: impl Into<String>, value: Scalar) -> Self {
        Self::from_fn(name, move |_| value.clone())
    }

    pub fn zero() -> Self {
        Self::constant("0", Scalar::zero())
    }

    /// Explicit table; states outside it take `default` or fail to evaluate.
    pub fn table(name: impl Into<String>, table: BTreeMap<StateId, Scalar>, default: Option<Scalar>) -> Self {
        let name = name.into();
        let fname = name.clone();
        Self::new(name, move |s| match table.get(s).or(default.as_ref()) {
            Some(v) => Ok(v.clone()),
            None => Err(EvaluationError {
                function: fname.clone(),
                state: s.to_string(),
                reason: "state missing from table".into(),
            }),
        })
    }

    pub fn exact_table(name: impl Into<String>, table: BTreeMap<StateId, Rational>) -> Self {
        Self::table(name, table.into_iter().map(|(s, v)| (s, Scalar::Exact(v))).collect(), None)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Evaluates and rejects negative values.
    pub fn eval(&self, state: &StateId) -> Result<Scalar, EvaluationError> {
        let v = (self.eval)(state)?;
        if v.is_negative() || v.to_f64().is_nan() {
            return Err(EvaluationError {
                function: self.name.clone(),
                state: state.to_string(),
                reason: format!("value {v} is not a non-negative real"),
            });
        }
        Ok(v)
    }

    /// Same function with a single value replaced.
    pub fn with_override(&self, state: StateId, value: Scalar) -> Self {
        let inner = Arc::clone(&self.eval);
        Self::new(format!("{}[{}↦{}]", self.name, state, value), move |s| {
            if *s == state {
                Ok(value.clone())
            } else {
                inner(s)
            }
        })
    }

    /// `c · V`.
    pub fn scaled(&self, c: Rational) -> Self {
        let inner = Arc::clone(&self.eval);
        Self::new(format!("{}·{}", c, self.name), move |s| Ok(inner(s)?.mul_rational(&c)))
    }

    /// `V + c`.
    pub fn shifted(&self, c: Scalar) -> Self {
        let inner = Arc::clone(&self.eval);
        Self::new(format!("{}+{}", self.name, c), move |s| Ok(inner(s)?.add(&c)))
    }

    /// Tabulates the function on `states`.
    pub fn tabulate<'a>(
        &self,
        states: impl IntoIterator<Item = &'a StateId>,
    ) -> Result<BTreeMap<StateId, Scalar>, EvaluationError> {
        states.into_iter().map(|s| Ok((s.clone(), self.eval(s)?))).collect()
    }
}

impl fmt::Debug for ValueFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ValueFunction({})", self.name)
    }
}

/// Natural-valued ranking function `U : S → ℕ`.
#[derive(Clone)]
pub struct RankingFunction {
    name: String,
    eval: Evaluator<u64>,
}

impl RankingFunction {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&StateId) -> Result<u64, EvaluationError> + Send + Sync + 'static,
    ) -> Self {
        RankingFunction {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn from_fn(name: impl Into<String>, f: impl Fn(&StateId) -> u64 + Send + Sync + 'static) -> Self {
        Self::new(name, move |s| Ok(f(s)))
    }

    pub fn constant(value: u64) -> Self {
        Self::from_fn(format!("{value}"), move |_| value)
    }

    pub fn table(name: impl Into<String>, table: BTreeMap<StateId, u64>, default: Option<u64>) -> Self {
        let name = name.into();
        let fname = name.clone();
        Self::new(name, move |s| {
            table.get(s).copied().or(default).ok_or_else(|| EvaluationError {
                function: fname.clone(),
                state: s.to_string(),
                reason: "state missing from table".into(),
            })
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, state: &StateId) -> Result<u64, EvaluationError> {
        (self.eval)(state)
    }
}

impl fmt::Debug for RankingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RankingFunction({})", self.name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Decrease,
    Probability,
}

/// `d_i` or `p_i` of the drift rule: a function of the level `r`.
#[derive(Clone)]
pub struct MonotoneScalarFunction {
    name: String,
    role: Role,
    eval: Arc<dyn Fn(&Scalar) -> Scalar + Send + Sync>,
}

impl MonotoneScalarFunction {
    pub fn new(name: impl Into<String>, role: Role, f: impl Fn(&Scalar) -> Scalar + Send + Sync + 'static) -> Self {
        MonotoneScalarFunction {
            name: name.into(),
            role,
            eval: Arc::new(f),
        }
    }

    pub fn constant(role: Role, value: Scalar) -> Self {
        Self::new(format!("{value}"), role, move |_| value.clone())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn eval(&self, r: &Scalar) -> Scalar {
        (self.eval)(r)
    }
}

impl fmt::Debug for MonotoneScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonotoneScalarFunction({}, {:?})", self.name, self.role)
    }
}

/// Invariant `I` and one absorbing region `J_i` per Streett pair.
#[derive(Clone, Debug)]
pub struct DecompositionWitness {
    pub invariant: Region,
    pub absorbing: Vec<Region>,
}

/// Per-pair certificates of the ranking-function rule.
#[derive(Clone, Debug)]
pub struct Rule1Pair {
    pub v: ValueFunction,
    pub w: ValueFunction,
    pub u: RankingFunction,
    pub gamma: Option<Scalar>,
}

#[derive(Clone, Debug)]
pub struct Rule1Bundle {
    pub witness: DecompositionWitness,
    pub v0: ValueFunction,
    pub pairs: Vec<Rule1Pair>,
}

/// Per-pair certificates of the drift rule.
#[derive(Clone, Debug)]
pub struct Rule2Pair {
    pub v: ValueFunction,
    pub w: ValueFunction,
    pub d: MonotoneScalarFunction,
    pub p: MonotoneScalarFunction,
    pub gamma: Option<Scalar>,
}

#[derive(Clone, Debug)]
pub struct Rule2Bundle {
    pub witness: DecompositionWitness,
    pub v0: ValueFunction,
    pub pairs: Vec<Rule2Pair>,
}

/// Closed-form certificates for the lending casino.
pub mod casino {
    use super::*;
    use crate::families::casino_return_probability;

    /// `V₁(s) = ((1-ε)/(1+ε))^{|s|}` on `Debt`, 1 on `Solvency`.
    pub fn v1(eps: Rational) -> ValueFunction {
        let name = format!("casino-v1({eps})");
        ValueFunction::new(name.clone(), move |s| match s.as_int() {
            Some(w) => Ok(Scalar::Exact(casino_return_probability(&eps, w))),
            None => Err(non_integer(&name, s)),
        })
    }

    /// `max{s + 1, 0}` as a value function.
    pub fn max_plus_one() -> ValueFunction {
        ValueFunction::new("max-plus-one", |s| match s.as_int() {
            Some(w) => Ok(Scalar::Exact(crate::scalar::int(w.saturating_add(1).max(0)))),
            None => Err(non_integer("max-plus-one", s)),
        })
    }

    /// `max{s + 1, 0}` as a ranking function.
    pub fn max_plus_one_rank() -> RankingFunction {
        RankingFunction::new("max-plus-one", |s| match s.as_int() {
            Some(w) => Ok(w.saturating_add(1).max(0) as u64),
            None => Err(non_integer("max-plus-one", s)),
        })
    }

    fn non_integer(name: &str, s: &StateId) -> EvaluationError {
        EvaluationError {
            function: name.to_string(),
            state: s.to_string(),
            reason: "expects an integer state".into(),
        }
    }
}
