//! JSON model and certificate documents.
//!
//! Probabilities and exact values are written as `"p/q"` text (or integers);
//! binary floats are rejected wherever exactness matters.

mod certificate;
mod document;

use std::fmt;
use std::path::Path;

use serde::de::{self, DeserializeOwned, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::error::Category;
use thiserror::Error;

pub use certificate::{
    check_certificate, CertificateDocument, FunctionSpec, PairCertificate, RuleTag, WindowSpec, DEFAULT_R_GRID,
};
pub use document::{
    parse_model, AcceptanceSpec, AutomatonSpec, ChainSection, Model, ModelDocument, PairSpec, PredicateSpec,
    RegionRef, RegionSpec, TransitionSpec,
};

use crate::certificate::CertError;
use crate::scalar::{parse_rational, Rational};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid document at {path}: {message}")]
    Validation { path: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Check(#[from] CertError),
}

impl ModelError {
    pub(crate) fn invalid(path: impl Into<String>, message: impl fmt::Display) -> Self {
        ModelError::Validation {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

/// Deserializes a document, reporting syntax errors by position and type
/// errors by JSON path.
pub(crate) fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, ModelError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        classify(e.into_inner(), path)
    })?;
    de.end().map_err(|e| classify(e, ".".into()))?;
    Ok(value)
}

fn classify(e: serde_json::Error, path: String) -> ModelError {
    match e.classify() {
        Category::Data => ModelError::Validation {
            path,
            message: strip_position(&e.to_string()),
        },
        _ => ModelError::Syntax {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        },
    }
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, ModelError> {
    std::fs::read_to_string(path).map_err(|e| ModelError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize")
}

/// An exact rational written as `"p/q"` text or a JSON integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Num(pub Rational);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct NumVisitor;
        impl Visitor<'_> for NumVisitor {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as \"p/q\" text or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                parse_rational(v).map(Num).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(crate::scalar::int(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(Rational::from_integer(v.into())))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Err(E::custom(format!("binary float {v} is not exact; write it as \"p/q\"")))
            }
        }
        deserializer.deserialize_any(NumVisitor)
    }
}

/// Builtin parameters accept text or numbers and are passed on as text.
pub(crate) fn param_text(params: &std::collections::BTreeMap<String, serde_json::Value>) -> std::collections::BTreeMap<String, String> {
    params
        .iter()
        .map(|(k, v)| {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            (k.clone(), text)
        })
        .collect()
}

/// Loads a model from a file.
pub fn load_model(path: impl AsRef<Path>) -> Result<Model, ModelError> {
    parse_model(&read_file(path.as_ref())?)
}

/// Loads a certificate document from a file.
pub fn load_certificate(path: impl AsRef<Path>) -> Result<CertificateDocument, ModelError> {
    CertificateDocument::from_json(&read_file(path.as_ref())?)
}
