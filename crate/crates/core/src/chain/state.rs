use std::fmt;

use serde::{Serialize, Serializer};

/// Identifier of a state inside a declared universe.
///
/// Built-in integer families use [`StateId::Int`], explicit models use
/// [`StateId::Name`], and chain × automaton products use [`StateId::Pair`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateId {
    Int(i64),
    Name(String),
    Pair(Box<StateId>, String),
}

impl StateId {
    pub fn name(name: impl Into<String>) -> Self {
        StateId::Name(name.into())
    }

    pub fn pair(state: StateId, automaton_state: impl Into<String>) -> Self {
        StateId::Pair(Box::new(state), automaton_state.into())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            StateId::Int(w) => Some(*w),
            _ => None,
        }
    }

    /// Chain component of a product state.
    pub fn chain_component(&self) -> Option<&StateId> {
        match self {
            StateId::Pair(s, _) => Some(s),
            _ => None,
        }
    }

    /// Automaton component of a product state.
    pub fn automaton_component(&self) -> Option<&str> {
        match self {
            StateId::Pair(_, q) => Some(q),
            _ => None,
        }
    }
}

impl From<i64> for StateId {
    fn from(w: i64) -> Self {
        StateId::Int(w)
    }
}

impl From<&str> for StateId {
    fn from(name: &str) -> Self {
        StateId::Name(name.to_string())
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateId::Int(w) => write!(f, "{w}"),
            StateId::Name(n) => f.write_str(n),
            StateId::Pair(s, q) => write!(f, "({s},{q})"),
        }
    }
}

impl Serialize for StateId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
