//! Streett conditions, deterministic Streett automata and the synchronous
//! product of a labelled chain with an automaton.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::chain::{ChainError, Distribution, Kernel, Labeling, MarkovChain, Region, StateId, Universe};

/// Ordered region pairs `(A_i, B_i)` read as `⋂_i Fin(A_i) ∪ Inf(B_i)`.
#[derive(Clone, Debug, Default)]
pub struct StreettCondition {
    pairs: Vec<(Region, Region)>,
}

impl StreettCondition {
    pub fn new(pairs: Vec<(Region, Region)>) -> Self {
        StreettCondition { pairs }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn pairs(&self) -> &[(Region, Region)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn with_pair(mut self, a: Region, b: Region) -> Self {
        self.pairs.push((a, b));
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OmegaError {
    #[error("letter mentions proposition {0:?} outside the alphabet")]
    UnknownProposition(String),
    #[error("automaton state {0:?} is not declared")]
    UnknownState(String),
    #[error("no transition from {state:?} on letter {letter:?}")]
    MissingTransition { state: String, letter: Vec<String> },
    #[error("alphabet of {0} propositions exceeds the limit of 16")]
    AlphabetTooLarge(usize),
    #[error("lasso loop must be non-empty")]
    EmptyLoop,
    #[error("state {state} carries label {proposition:?} outside the automaton alphabet")]
    AlphabetMismatch { state: StateId, proposition: String },
    #[error("chain has no labelling")]
    Unlabelled,
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// A letter: the set of propositions that hold.
pub type Letter = BTreeSet<String>;

/// Deterministic Streett automaton with a total transition table over `2^Π`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dsa {
    states: Vec<String>,
    initial: String,
    alphabet: BTreeSet<String>,
    transitions: BTreeMap<(String, Letter), String>,
    acceptance: Vec<(BTreeSet<String>, BTreeSet<String>)>,
}

impl Dsa {
    /// Validates that the table is total over `states × 2^alphabet`.
    pub fn new(
        states: Vec<String>,
        initial: String,
        alphabet: BTreeSet<String>,
        transitions: BTreeMap<(String, Letter), String>,
        acceptance: Vec<(BTreeSet<String>, BTreeSet<String>)>,
    ) -> Result<Self, OmegaError> {
        if alphabet.len() > 16 {
            return Err(OmegaError::AlphabetTooLarge(alphabet.len()));
        }
        let declared: BTreeSet<&String> = states.iter().collect();
        let known = |q: &String| {
            if declared.contains(q) {
                Ok(())
            } else {
                Err(OmegaError::UnknownState(q.clone()))
            }
        };
        known(&initial)?;
        for (f, g) in &acceptance {
            f.iter().chain(g).try_for_each(known)?;
        }
        for ((from, letter), to) in &transitions {
            known(from)?;
            known(to)?;
            if let Some(p) = letter.iter().find(|p| !alphabet.contains(*p)) {
                return Err(OmegaError::UnknownProposition(p.clone()));
            }
        }
        let letters = all_letters(&alphabet);
        for q in &states {
            for letter in &letters {
                if !transitions.contains_key(&(q.clone(), letter.clone())) {
                    return Err(OmegaError::MissingTransition {
                        state: q.clone(),
                        letter: letter.iter().cloned().collect(),
                    });
                }
            }
        }
        Ok(Dsa {
            states,
            initial,
            alphabet,
            transitions,
            acceptance,
        })
    }

    /// Builds the table by evaluating `delta` on every state and letter.
    pub fn from_fn(
        states: &[&str],
        initial: &str,
        alphabet: &[&str],
        delta: impl Fn(&str, &Letter) -> String,
        acceptance: Vec<(Vec<&str>, Vec<&str>)>,
    ) -> Result<Self, OmegaError> {
        let alphabet: BTreeSet<String> = alphabet.iter().map(|p| p.to_string()).collect();
        if alphabet.len() > 16 {
            return Err(OmegaError::AlphabetTooLarge(alphabet.len()));
        }
        let mut transitions = BTreeMap::new();
        for q in states {
            for letter in all_letters(&alphabet) {
                let to = delta(q, &letter);
                transitions.insert((q.to_string(), letter), to);
            }
        }
        let set = |qs: Vec<&str>| qs.into_iter().map(str::to_string).collect();
        Self::new(
            states.iter().map(|q| q.to_string()).collect(),
            initial.to_string(),
            alphabet,
            transitions,
            acceptance.into_iter().map(|(f, g)| (set(f), set(g))).collect(),
        )
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> &str {
        &self.initial
    }

    pub fn alphabet(&self) -> &BTreeSet<String> {
        &self.alphabet
    }

    pub fn transitions(&self) -> &BTreeMap<(String, Letter), String> {
        &self.transitions
    }

    pub fn acceptance(&self) -> &[(BTreeSet<String>, BTreeSet<String>)] {
        &self.acceptance
    }

    fn check_letter(&self, letter: &Letter) -> Result<(), OmegaError> {
        match letter.iter().find(|p| !self.alphabet.contains(*p)) {
            Some(p) => Err(OmegaError::UnknownProposition(p.clone())),
            None => Ok(()),
        }
    }

    /// `T(q, letter)`.
    pub fn step(&self, q: &str, letter: &Letter) -> Result<&str, OmegaError> {
        self.check_letter(letter)?;
        self.transitions
            .get(&(q.to_string(), letter.clone()))
            .map(String::as_str)
            .ok_or_else(|| OmegaError::UnknownState(q.to_string()))
    }

    /// Run `q₀ q₁ … q_n` on `n` letters.
    pub fn run(&self, letters: &[Letter]) -> Result<Vec<String>, OmegaError> {
        let mut run = Vec::with_capacity(letters.len() + 1);
        run.push(self.initial.clone());
        for letter in letters {
            let next = self.step(run.last().expect("run is non-empty"), letter)?;
            run.push(next.to_string());
        }
        Ok(run)
    }

    /// Acceptance of the ultimately periodic word `stem · loop^ω`.
    ///
    /// The loop is unrolled until an `(automaton state, loop position)` pair
    /// repeats; the automaton states seen between the two occurrences are
    /// exactly those visited infinitely often.
    pub fn accepts_lasso(&self, stem: &[Letter], cycle: &[Letter]) -> Result<bool, OmegaError> {
        if cycle.is_empty() {
            return Err(OmegaError::EmptyLoop);
        }
        for letter in cycle {
            self.check_letter(letter)?;
        }
        let mut q = self.run(stem)?.pop().expect("run is non-empty");
        let mut seen: HashMap<(String, usize), usize> = HashMap::new();
        let mut trace: Vec<String> = Vec::new();
        let mut pos = 0;
        let start = loop {
            if let Some(&first) = seen.get(&(q.clone(), pos)) {
                break first;
            }
            seen.insert((q.clone(), pos), trace.len());
            trace.push(q.clone());
            q = self.step(&q, &cycle[pos])?.to_string();
            pos = (pos + 1) % cycle.len();
        };
        let recurring: BTreeSet<&String> = trace[start..].iter().collect();
        Ok(self.acceptance.iter().all(|(f, g)| {
            !f.iter().any(|q| recurring.contains(q)) || g.iter().any(|q| recurring.contains(q))
        }))
    }
}

/// Every subset of `alphabet`, in a fixed order.
pub fn all_letters(alphabet: &BTreeSet<String>) -> Vec<Letter> {
    let props: Vec<&String> = alphabet.iter().collect();
    (0u32..(1 << props.len()))
        .map(|mask| {
            props
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, p)| (*p).clone())
                .collect()
        })
        .collect()
}

struct ProductKernel {
    chain: MarkovChain,
    labeling: Labeling,
    dsa: Arc<Dsa>,
    universe: Universe,
}

impl ProductKernel {
    fn row(&self, state: &StateId) -> Result<Distribution, OmegaError> {
        let (s, q) = match state {
            StateId::Pair(s, q) => (s.as_ref(), q.as_str()),
            other => return Err(ChainError::StateOutsideUniverse(other.clone()).into()),
        };
        let label = self.labeling.label(s);
        if let Some(p) = label.iter().find(|p| !self.dsa.alphabet.contains(*p)) {
            return Err(OmegaError::AlphabetMismatch {
                state: s.clone(),
                proposition: p.clone(),
            });
        }
        let next = self.dsa.step(q, &label)?.to_string();
        Ok(self.chain.successors(s)?.map_states(|u| StateId::pair(u.clone(), next.clone())))
    }
}

impl Kernel for ProductKernel {
    fn successors(&self, state: &StateId) -> Result<Distribution, ChainError> {
        self.row(state).map_err(|e| match e {
            OmegaError::Chain(c) => c,
            other => ChainError::InvalidRow {
                state: state.clone(),
                reason: other.to_string(),
            },
        })
    }

    fn universe(&self) -> &Universe {
        &self.universe
    }
}

/// Synchronous product: `(s, q) → (s', T(q, ⟦s⟧))` with probability `P(s, s')`,
/// started from `μ × δ_{q₀}`, with acceptance pairs lifted to `Ŝ × F_i`, `Ŝ × G_i`.
///
/// On finite chains only the pairs reachable from the initial support are kept.
pub fn product(chain: &MarkovChain, dsa: &Dsa) -> Result<(MarkovChain, StreettCondition), OmegaError> {
    let labeling = chain.labeling().cloned().ok_or(OmegaError::Unlabelled)?;
    let q0 = dsa.initial.clone();
    let initial = chain.initial().map_states(|s| StateId::pair(s.clone(), q0.clone()));
    let universe = match chain.universe() {
        Universe::Finite(_) => Universe::Finite(Vec::new()),
        Universe::Generated { family, params } => Universe::Generated {
            family: format!("{family}×dsa"),
            params: params.clone(),
        },
    };
    let kernel = ProductKernel {
        chain: chain.clone(),
        labeling: labeling.clone(),
        dsa: Arc::new(dsa.clone()),
        universe,
    };
    let product_chain = if chain.is_finite() {
        let mut rows = BTreeMap::new();
        let mut queue: VecDeque<StateId> = initial.support().cloned().collect();
        while let Some(s) = queue.pop_front() {
            if rows.contains_key(&s) {
                continue;
            }
            let row = kernel.row(&s)?;
            queue.extend(row.support().filter(|u| !rows.contains_key(*u)).cloned());
            rows.insert(s, row);
        }
        MarkovChain::explicit(initial, rows)?
    } else {
        MarkovChain::new(initial, Arc::new(kernel))?
    };
    let lifted = Labeling::new(move |s| match s.chain_component() {
        Some(inner) => labeling.label(inner),
        None => BTreeSet::new(),
    });
    let pairs = dsa
        .acceptance
        .iter()
        .enumerate()
        .map(|(i, (f, g))| {
            (
                Region::automaton_states(format!("Ŝ×F{}", i + 1), f.iter().cloned()),
                Region::automaton_states(format!("Ŝ×G{}", i + 1), g.iter().cloned()),
            )
        })
        .collect();
    Ok((product_chain.with_labeling(lifted), StreettCondition::new(pairs)))
}

impl fmt::Display for StreettCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pairs
            .iter()
            .map(|(a, b)| format!("({}, {})", a.name(), b.name()))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}
