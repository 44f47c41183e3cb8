use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{from_json, param_text, to_json, ModelError, Num, FORMAT_VERSION};
use crate::chain::{ChainError, Distribution, Labeling, MarkovChain, Region, StateId};
use crate::families::builtin;
use crate::omega::{all_letters, product, Dsa, Letter, StreettCondition};

fn default_version() -> u32 {
    FORMAT_VERSION
}

/// Either an explicit chain (`states`, `initial`, `transitions`) or a builtin
/// family (`builtin`, `params`, optionally `initial`).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub states: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub initial: BTreeMap<String, Num>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub transitions: BTreeMap<String, BTreeMap<String, Num>>,
}

/// Integer predicate: `int_ge`, `int_gt`, `int_le`, `int_lt` take `value`,
/// `int_range` takes `lo` and `hi`; `all` and `empty` take nothing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredicateSpec {
    pub predicate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionSpec {
    States(Vec<String>),
    Predicate(PredicateSpec),
}

/// A region given by name or inline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionRef {
    Named(String),
    Inline(RegionSpec),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub a: String,
    pub b: String,
}

/// One transition; a missing `letter` makes it the default for every letter
/// not listed explicitly from `from`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSpec {
    pub from: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub letter: Option<Vec<String>>,
    pub to: String,
}

/// Pair `(F, G)` of automaton-state sets: visit `a` finitely often or `b`
/// infinitely often.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceptanceSpec {
    pub a: Vec<String>,
    pub b: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonSpec {
    pub states: Vec<String>,
    pub initial: String,
    pub alphabet: Vec<String>,
    pub transitions: Vec<TransitionSpec>,
    pub acceptance: Vec<AcceptanceSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub chain: ChainSection,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub regions: BTreeMap<String, RegionSpec>,
    /// Omitted: the builtin family's default condition, or none.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub streett: Option<Vec<PairSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automaton: Option<AutomatonSpec>,
}

impl ModelDocument {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        from_json(text)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Explicit document for a finite chain, with the given regions and pairs.
    pub fn explicit(
        chain: &MarkovChain,
        regions: &BTreeMap<String, Region>,
        streett: Option<Vec<PairSpec>>,
    ) -> Result<Self, ModelError> {
        let states = chain
            .states()
            .map_err(|_| ModelError::invalid("chain", "only finite chains can be written explicitly"))?;
        let text = |s: &StateId| s.to_string();
        let mut transitions = BTreeMap::new();
        for s in states {
            let row = chain.successors(s).map_err(|e| ModelError::invalid("chain.transitions", e))?;
            transitions.insert(text(s), row.iter().map(|(u, p)| (text(u), Num(p.clone()))).collect());
        }
        let mut labels = BTreeMap::new();
        if let Some(labeling) = chain.labeling() {
            for s in states {
                let l = labeling.label(s);
                if !l.is_empty() {
                    labels.insert(text(s), l.into_iter().collect());
                }
            }
        }
        Ok(ModelDocument {
            format_version: FORMAT_VERSION,
            chain: ChainSection {
                states: states.iter().map(text).collect(),
                initial: chain.initial().iter().map(|(s, p)| (text(s), Num(p.clone()))).collect(),
                transitions,
                ..ChainSection::default()
            },
            labels,
            regions: regions
                .iter()
                .map(|(name, r)| (name.clone(), RegionSpec::States(r.members_in(states).iter().map(text).collect())))
                .collect(),
            streett,
            automaton: None,
        })
    }
}

/// A validated model.
#[derive(Clone, Debug)]
pub struct Model {
    pub document: ModelDocument,
    pub chain: MarkovChain,
    pub regions: BTreeMap<String, Region>,
    pub streett: StreettCondition,
    pub automaton: Option<Dsa>,
}

/// Parses and validates a model document.
pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    Model::from_document(ModelDocument::from_json(text)?)
}

/// Resolves state names against a chain: by display name on finite chains,
/// as integers on generated ones.
pub(crate) fn resolve_state(chain: &MarkovChain, text: &str) -> Result<StateId, String> {
    match chain.states() {
        Ok(states) => states
            .iter()
            .find(|s| s.to_string() == text)
            .cloned()
            .ok_or_else(|| format!("unknown state {text:?}")),
        Err(_) => text
            .trim()
            .parse::<i64>()
            .map(StateId::Int)
            .map_err(|_| format!("state {text:?} is not an integer")),
    }
}

pub(crate) fn build_region(chain: &MarkovChain, name: &str, spec: &RegionSpec, path: &str) -> Result<Region, ModelError> {
    match spec {
        RegionSpec::States(names) => {
            let states = names
                .iter()
                .enumerate()
                .map(|(i, s)| resolve_state(chain, s).map_err(|m| ModelError::invalid(format!("{path}[{i}]"), m)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Region::from_states(name, states))
        }
        RegionSpec::Predicate(p) => {
            let need = |v: Option<i64>, field: &str| {
                v.ok_or_else(|| ModelError::invalid(format!("{path}.{field}"), format!("{} needs {field}", p.predicate)))
            };
            Ok(match p.predicate.as_str() {
                "all" => Region::all().with_name(name),
                "empty" => Region::empty().with_name(name),
                "int_ge" => Region::int_at_least(name, need(p.value, "value")?),
                "int_gt" => Region::int_at_least(name, need(p.value, "value")?.saturating_add(1)),
                "int_lt" => Region::int_below(name, need(p.value, "value")?),
                "int_le" => Region::int_below(name, need(p.value, "value")?.saturating_add(1)),
                "int_range" => {
                    let (lo, hi) = (need(p.lo, "lo")?, need(p.hi, "hi")?);
                    Region::from_predicate(name, move |s| s.as_int().is_some_and(|w| lo <= w && w <= hi))
                }
                other => return Err(ModelError::invalid(format!("{path}.predicate"), format!("unknown predicate {other:?}"))),
            })
        }
    }
}

fn row_error(path: String, state: &str, e: ChainError) -> ModelError {
    let message = match e {
        ChainError::NotNormalized { sum } => format!("row of {state} sums to {sum}, not 1"),
        ChainError::ProbabilityOutOfRange { state: u, value } => format!("probability {value} of {u} is outside [0, 1]"),
        ChainError::EmptyDistribution => format!("row of {state} is empty"),
        other => other.to_string(),
    };
    ModelError::invalid(path, message)
}

fn explicit_chain(section: &ChainSection, labels: &BTreeMap<String, Vec<String>>) -> Result<MarkovChain, ModelError> {
    if !section.params.is_empty() {
        return Err(ModelError::invalid("chain.params", "params apply to builtin chains only"));
    }
    let mut declared: BTreeSet<&str> = section.states.iter().map(String::as_str).collect();
    if declared.is_empty() {
        declared = section.transitions.keys().map(String::as_str).collect();
    }
    if declared.is_empty() {
        return Err(ModelError::invalid("chain", "needs either builtin or transitions"));
    }
    let known = |s: &str, path: String| {
        if declared.contains(s) {
            Ok(StateId::name(s))
        } else {
            Err(ModelError::invalid(path, format!("unknown state {s:?}")))
        }
    };
    let mut rows = Vec::new();
    for s in &declared {
        let row = section
            .transitions
            .get(*s)
            .ok_or_else(|| ModelError::invalid("chain.transitions", format!("state {s:?} has no row")))?;
        let points = row
            .iter()
            .map(|(u, p)| Ok((known(u, format!("chain.transitions.{s}.{u}"))?, p.0.clone())))
            .collect::<Result<Vec<_>, ModelError>>()?;
        let dist = Distribution::new(points).map_err(|e| row_error(format!("chain.transitions.{s}"), s, e))?;
        rows.push((StateId::name(*s), dist));
    }
    for s in section.transitions.keys() {
        known(s, format!("chain.transitions.{s}"))?;
    }
    if section.initial.is_empty() {
        return Err(ModelError::invalid("chain.initial", "missing initial distribution"));
    }
    let initial = section
        .initial
        .iter()
        .map(|(s, p)| Ok((known(s, format!("chain.initial.{s}"))?, p.0.clone())))
        .collect::<Result<Vec<_>, ModelError>>()?;
    let initial = Distribution::new(initial).map_err(|e| row_error("chain.initial".into(), "initial", e))?;
    let mut table: BTreeMap<StateId, BTreeSet<String>> = BTreeMap::new();
    for (s, props) in labels {
        let id = known(s, format!("labels.{s}"))?;
        table.insert(id, props.iter().cloned().collect());
    }
    let chain = MarkovChain::explicit(initial, rows).map_err(|e| ModelError::invalid("chain", e))?;
    Ok(chain.with_labeling(Labeling::from_table(table)))
}

fn automaton(spec: &AutomatonSpec) -> Result<Dsa, ModelError> {
    let alphabet: BTreeSet<String> = spec.alphabet.iter().cloned().collect();
    let letters = all_letters(&alphabet);
    let mut transitions: BTreeMap<(String, Letter), String> = BTreeMap::new();
    let mut defaults: BTreeMap<&str, &str> = BTreeMap::new();
    for (i, t) in spec.transitions.iter().enumerate() {
        let path = format!("automaton.transitions[{i}]");
        match &t.letter {
            Some(letter) => {
                let key = (t.from.clone(), letter.iter().cloned().collect::<Letter>());
                if transitions.insert(key, t.to.clone()).is_some() {
                    return Err(ModelError::invalid(path, "duplicate transition"));
                }
            }
            None => {
                if defaults.insert(&t.from, &t.to).is_some() {
                    return Err(ModelError::invalid(path, "duplicate default transition"));
                }
            }
        }
    }
    for (from, to) in defaults {
        for letter in &letters {
            transitions
                .entry((from.to_string(), letter.clone()))
                .or_insert_with(|| to.to_string());
        }
    }
    let set = |v: &[String]| v.iter().cloned().collect();
    Dsa::new(
        spec.states.clone(),
        spec.initial.clone(),
        alphabet,
        transitions,
        spec.acceptance.iter().map(|p| (set(&p.a), set(&p.b))).collect(),
    )
    .map_err(|e| ModelError::invalid("automaton", e))
}

impl Model {
    pub fn from_document(document: ModelDocument) -> Result<Self, ModelError> {
        if document.format_version != FORMAT_VERSION {
            return Err(ModelError::invalid(
                "format_version",
                format!("unsupported version {}", document.format_version),
            ));
        }
        let section = &document.chain;
        let (mut chain, mut regions, default_streett) = match &section.builtin {
            Some(name) => {
                if !section.transitions.is_empty() || !section.states.is_empty() {
                    return Err(ModelError::invalid("chain", "builtin chains take no states or transitions"));
                }
                if !document.labels.is_empty() {
                    return Err(ModelError::invalid("labels", "labels apply to explicit chains only"));
                }
                let b = builtin(name, &param_text(&section.params)).map_err(|e| ModelError::invalid("chain", e))?;
                (b.chain, b.regions, b.streett)
            }
            None => (explicit_chain(section, &document.labels)?, BTreeMap::new(), StreettCondition::empty()),
        };
        if section.builtin.is_some() && !section.initial.is_empty() {
            let initial = section
                .initial
                .iter()
                .map(|(s, p)| {
                    resolve_state(&chain, s)
                        .map(|id| (id, p.0.clone()))
                        .map_err(|m| ModelError::invalid(format!("chain.initial.{s}"), m))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let initial = Distribution::new(initial).map_err(|e| row_error("chain.initial".into(), "initial", e))?;
            chain = chain.with_initial(initial).map_err(|e| ModelError::invalid("chain.initial", e))?;
        }
        for (name, spec) in &document.regions {
            let region = build_region(&chain, name, spec, &format!("regions.{name}"))?;
            regions.insert(name.clone(), region);
        }
        let streett = match &document.streett {
            None => default_streett,
            Some(pairs) => {
                let lookup = |name: &str, path: String| {
                    regions
                        .get(name)
                        .cloned()
                        .ok_or_else(|| ModelError::invalid(path, format!("unknown region {name:?}")))
                };
                let mut cond = StreettCondition::empty();
                for (i, p) in pairs.iter().enumerate() {
                    cond = cond.with_pair(
                        lookup(&p.a, format!("streett[{i}].a"))?,
                        lookup(&p.b, format!("streett[{i}].b"))?,
                    );
                }
                cond
            }
        };
        let automaton = document.automaton.as_ref().map(automaton).transpose()?;
        if let (Some(dsa), Ok(states), Some(labeling)) = (&automaton, chain.states(), chain.labeling()) {
            for s in states {
                if let Some(p) = labeling.label(s).into_iter().find(|p| !dsa.alphabet().contains(p)) {
                    return Err(ModelError::invalid(
                        "automaton.alphabet",
                        format!("label {p:?} of state {s} is not in the alphabet"),
                    ));
                }
            }
        }
        Ok(Model {
            document,
            chain,
            regions,
            streett,
            automaton,
        })
    }

    pub fn state(&self, text: &str) -> Result<StateId, String> {
        resolve_state(&self.chain, text)
    }

    pub fn region(&self, name: &str) -> Option<&Region> {
        self.regions.get(name)
    }

    /// Resolves a region reference on `chain`, which is the model's chain or
    /// its product with the automaton. Named regions and predicates are lifted
    /// to product states through their chain component; state lists name
    /// states of `chain` directly.
    pub fn resolve_region(&self, chain: &MarkovChain, r: &RegionRef, name: &str, path: &str) -> Result<Region, ModelError> {
        let base = match r {
            RegionRef::Named(n) => self
                .regions
                .get(n)
                .cloned()
                .ok_or_else(|| ModelError::invalid(path, format!("unknown region {n:?}")))?,
            RegionRef::Inline(spec @ RegionSpec::States(_)) => return build_region(chain, name, spec, path),
            RegionRef::Inline(spec) => build_region(&self.chain, name, spec, path)?,
        };
        if self.automaton.is_none() {
            return Ok(base);
        }
        let lifted = move |s: &StateId| s.chain_component().is_some_and(|inner| base.contains(inner));
        Ok(match chain.states() {
            Ok(states) => Region::from_states(name, states.iter().filter(|s| lifted(s)).cloned()),
            Err(_) => Region::from_predicate(name, lifted),
        })
    }

    /// Chain and condition whose acceptance probability the model asks for:
    /// the product with the automaton and its lifted pairs if one is declared,
    /// otherwise the chain with the `streett` pairs.
    pub fn target(&self) -> Result<(MarkovChain, StreettCondition), ModelError> {
        match &self.automaton {
            Some(dsa) => product(&self.chain, dsa).map_err(|e| ModelError::invalid("automaton", e)),
            None => Ok((self.chain.clone(), self.streett.clone())),
        }
    }

    /// Explicit document of the expanded product, with lifted pairs as
    /// regions `F1`, `G1`, ...
    pub fn expand_product(&self) -> Result<ModelDocument, ModelError> {
        let (chain, cond) = self.target()?;
        let mut regions = BTreeMap::new();
        let mut pairs = Vec::new();
        for (i, (f, g)) in cond.pairs().iter().enumerate() {
            let (a, b) = (format!("F{}", i + 1), format!("G{}", i + 1));
            regions.insert(a.clone(), f.clone());
            regions.insert(b.clone(), g.clone());
            pairs.push(PairSpec { a, b });
        }
        ModelDocument::explicit(&chain, &regions, Some(pairs))
    }
}
