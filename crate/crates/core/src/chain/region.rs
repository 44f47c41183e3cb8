use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::StateId;

type Predicate = Arc<dyn Fn(&StateId) -> bool + Send + Sync>;

/// A named set of states given by a membership predicate, optionally with an
/// explicit enumeration that agrees with the predicate.
#[derive(Clone)]
pub struct Region {
    name: String,
    predicate: Predicate,
    enumeration: Option<Arc<BTreeSet<StateId>>>,
}

impl Region {
    pub fn from_states(name: impl Into<String>, states: impl IntoIterator<Item = StateId>) -> Self {
        let set: Arc<BTreeSet<StateId>> = Arc::new(states.into_iter().collect());
        let members = Arc::clone(&set);
        Region {
            name: name.into(),
            predicate: Arc::new(move |s| members.contains(s)),
            enumeration: Some(set),
        }
    }

    pub fn from_predicate(
        name: impl Into<String>,
        predicate: impl Fn(&StateId) -> bool + Send + Sync + 'static,
    ) -> Self {
        Region {
            name: name.into(),
            predicate: Arc::new(predicate),
            enumeration: None,
        }
    }

    /// Region of named states, e.g. `Region::named("A", ["s1", "s3"])`.
    pub fn named<'a>(name: impl Into<String>, states: impl IntoIterator<Item = &'a str>) -> Self {
        Self::from_states(name, states.into_iter().map(StateId::name))
    }

    pub fn empty() -> Self {
        Self::from_states("∅", std::iter::empty())
    }

    pub fn all() -> Self {
        Self::from_predicate("S", |_| true)
    }

    /// Integer states `w` with `w >= bound`.
    pub fn int_at_least(name: impl Into<String>, bound: i64) -> Self {
        Self::from_predicate(name, move |s| s.as_int().is_some_and(|w| w >= bound))
    }

    /// Integer states `w` with `w < bound`.
    pub fn int_below(name: impl Into<String>, bound: i64) -> Self {
        Self::from_predicate(name, move |s| s.as_int().is_some_and(|w| w < bound))
    }

    pub fn int_range(name: impl Into<String>, lo: i64, hi: i64) -> Self {
        Self::from_states(name, (lo..=hi).map(StateId::Int))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn contains(&self, state: &StateId) -> bool {
        (self.predicate)(state)
    }

    pub fn enumeration(&self) -> Option<&BTreeSet<StateId>> {
        self.enumeration.as_deref()
    }

    /// Members among `states`, in the order given.
    pub fn members_in<'a>(&self, states: impl IntoIterator<Item = &'a StateId>) -> Vec<StateId> {
        states.into_iter().filter(|s| self.contains(s)).cloned().collect()
    }

    pub fn union(&self, other: &Region) -> Region {
        let (a, b) = (Arc::clone(&self.predicate), Arc::clone(&other.predicate));
        let enumeration = match (&self.enumeration, &other.enumeration) {
            (Some(x), Some(y)) => Some(Arc::new(x.union(y).cloned().collect())),
            _ => None,
        };
        Region {
            name: format!("{}∪{}", self.name, other.name),
            predicate: Arc::new(move |s| a(s) || b(s)),
            enumeration,
        }
    }

    pub fn intersection(&self, other: &Region) -> Region {
        let (a, b) = (Arc::clone(&self.predicate), Arc::clone(&other.predicate));
        let enumeration = match (&self.enumeration, &other.enumeration) {
            (Some(x), _) => Some(Arc::new(x.iter().filter(|s| b(s)).cloned().collect())),
            (None, Some(y)) => Some(Arc::new(y.iter().filter(|s| a(s)).cloned().collect())),
            (None, None) => None,
        };
        Region {
            name: format!("{}∩{}", self.name, other.name),
            predicate: Arc::new(move |s| a(s) && b(s)),
            enumeration,
        }
    }

    pub fn difference(&self, other: &Region) -> Region {
        let (a, b) = (Arc::clone(&self.predicate), Arc::clone(&other.predicate));
        let enumeration = self
            .enumeration
            .as_ref()
            .map(|x| Arc::new(x.iter().filter(|s| !b(s)).cloned().collect()));
        Region {
            name: format!("{}∖{}", self.name, other.name),
            predicate: Arc::new(move |s| a(s) && !b(s)),
            enumeration,
        }
    }

    /// Complement relative to whatever universe the region is evaluated in.
    pub fn complement(&self) -> Region {
        let a = Arc::clone(&self.predicate);
        Region {
            name: format!("{}ᶜ", self.name),
            predicate: Arc::new(move |s| !a(s)),
            enumeration: None,
        }
    }

    /// Lifts a region on automaton states to product states `Ŝ × F`.
    pub fn automaton_states(name: impl Into<String>, states: impl IntoIterator<Item = String>) -> Self {
        let set: BTreeSet<String> = states.into_iter().collect();
        Self::from_predicate(name, move |s| {
            s.automaton_component().is_some_and(|q| set.contains(q))
        })
    }
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("Region");
        d.field("name", &self.name);
        if let Some(e) = &self.enumeration {
            d.field("states", e);
        }
        d.finish()
    }
}
