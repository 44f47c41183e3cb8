use std::fmt;

use serde::Serialize;

use crate::chain::StateId;
use crate::scalar::{Scalar, APPROX_TOLERANCE};

/// Witnesses kept per condition; the total count is always reported.
pub const MAX_WITNESSES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    PassOnWindow,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        !matches!(self, Verdict::Fail)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "Pass",
            Verdict::Fail => "Fail",
            Verdict::PassOnWindow => "PassOnWindow",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    /// Evaluates `lhs ⋈ rhs` and returns whether it holds together with the
    /// signed slack (negative or zero for strict relations when violated).
    pub fn evaluate(self, lhs: &Scalar, rhs: &Scalar) -> (bool, Scalar) {
        match self {
            Relation::Le => {
                let c = lhs.check_le(rhs);
                (c.holds, c.slack)
            }
            Relation::Ge => {
                let c = rhs.check_le(lhs);
                (c.holds, c.slack)
            }
            Relation::Lt => {
                let c = rhs.check_gt(lhs);
                (c.holds, c.slack)
            }
            Relation::Gt => {
                let c = lhs.check_gt(rhs);
                (c.holds, c.slack)
            }
            Relation::Eq => {
                let d = lhs.sub(rhs);
                let holds = match &d {
                    Scalar::Exact(x) => num_traits::Zero::is_zero(x),
                    Scalar::Approx(x) => x.abs() <= APPROX_TOLERANCE,
                };
                let slack = if d.is_negative() { d } else { Scalar::zero().sub(&d) };
                (holds, slack)
            }
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "≤",
            Relation::Lt => "<",
            Relation::Ge => "≥",
            Relation::Gt => ">",
            Relation::Eq => "=",
        })
    }
}

/// Where a condition was violated.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    State { state: StateId },
    Level { r: Scalar },
    Levels { r1: Scalar, r2: Scalar },
}

impl Witness {
    pub fn state(&self) -> Option<&StateId> {
        match self {
            Witness::State { state } => Some(state),
            _ => None,
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::State { state } => write!(f, "s={state}"),
            Witness::Level { r } => write!(f, "r={r}"),
            Witness::Levels { r1, r2 } => write!(f, "(r1,r2)=({r1},{r2})"),
        }
    }
}

/// A concrete counterexample: `lhs ⋈ rhs` fails at `at`.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub at: Witness,
    pub lhs: Scalar,
    pub relation: Relation,
    pub rhs: Scalar,
    pub slack: Scalar,
}

/// `ε_r` at one grid level; `None` when the sublevel set is empty.
#[derive(Clone, Debug, Serialize)]
pub struct LevelValue {
    pub r: Scalar,
    pub value: Option<Scalar>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionEntry {
    pub tag: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<usize>,
    pub verdict: Verdict,
    pub checked: usize,
    pub violations: usize,
    pub witnesses: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<(String, Scalar)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<LevelValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ConditionEntry {
    pub fn first_witness_state(&self) -> Option<&StateId> {
        self.witnesses.iter().find_map(|v| v.at.state())
    }

    pub fn witness_states(&self) -> Vec<&StateId> {
        self.witnesses.iter().filter_map(|v| v.at.state()).collect()
    }

    /// Named value attached to the entry, such as `γ` or a supremum.
    pub fn value(&self, name: &str) -> Option<&Scalar> {
        self.value.as_ref().filter(|(n, _)| n == name).map(|(_, v)| v)
    }
}

/// Collects the inequalities of one condition.
pub(crate) struct EntryBuilder {
    tag: String,
    pair: Option<usize>,
    checked: usize,
    violations: Vec<Violation>,
    value: Option<(String, Scalar)>,
    levels: Vec<LevelValue>,
    note: Option<String>,
}

impl EntryBuilder {
    pub(crate) fn new(tag: impl Into<String>, pair: Option<usize>) -> Self {
        EntryBuilder {
            tag: tag.into(),
            pair,
            checked: 0,
            violations: Vec::new(),
            value: None,
            levels: Vec::new(),
            note: None,
        }
    }

    pub(crate) fn require(&mut self, at: Witness, lhs: Scalar, relation: Relation, rhs: Scalar) -> bool {
        self.checked += 1;
        let (holds, slack) = relation.evaluate(&lhs, &rhs);
        if !holds {
            self.violations.push(Violation {
                at,
                lhs,
                relation,
                rhs,
                slack,
            });
        }
        holds
    }

    pub(crate) fn value(&mut self, name: &str, v: Scalar) {
        self.value = Some((name.to_string(), v));
    }

    pub(crate) fn levels(&mut self, levels: Vec<LevelValue>) {
        self.levels = levels;
    }

    pub(crate) fn note(&mut self, note: impl Into<String>) {
        self.note = Some(note.into());
    }

    /// Orders violations by magnitude, worst first; ties keep check order.
    pub(crate) fn finish(mut self) -> ConditionEntry {
        self.violations.sort_by(|a, b| a.slack.total_cmp(&b.slack));
        let count = self.violations.len();
        self.violations.truncate(MAX_WITNESSES);
        ConditionEntry {
            tag: self.tag,
            pair: self.pair,
            verdict: if count == 0 { Verdict::Pass } else { Verdict::Fail },
            checked: self.checked,
            violations: count,
            witnesses: self.violations,
            value: self.value,
            levels: self.levels,
            note: self.note,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub rule: String,
    pub verdict: Verdict,
    pub entries: Vec<ConditionEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub caveats: Vec<String>,
}

impl CheckReport {
    pub(crate) fn assemble(
        rule: &str,
        entries: Vec<ConditionEntry>,
        bound: Option<Scalar>,
        window: Option<String>,
        on_window: bool,
        caveats: Vec<String>,
    ) -> Self {
        let failed = entries.iter().any(|e| e.verdict == Verdict::Fail);
        let verdict = match (failed, on_window) {
            (true, _) => Verdict::Fail,
            (false, true) => Verdict::PassOnWindow,
            (false, false) => Verdict::Pass,
        };
        CheckReport {
            rule: rule.to_string(),
            verdict,
            entries,
            bound: if failed { None } else { bound },
            window,
            caveats,
        }
    }

    pub fn entry(&self, tag: &str) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.tag == tag)
    }

    pub fn entry_for(&self, tag: &str, pair: usize) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.tag == tag && e.pair == Some(pair))
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionEntry> {
        self.entries.iter().filter(|e| e.verdict == Verdict::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.verdict)?;
        if let Some(w) = &self.window {
            write!(f, " (window {w})")?;
        }
        writeln!(f)?;
        for e in &self.entries {
            write!(f, "  {:<24}", e.tag)?;
            if let Some(i) = e.pair {
                write!(f, " pair {i}")?;
            }
            write!(f, " {} ({} checked", e.verdict, e.checked)?;
            if e.violations > 0 {
                write!(f, ", {} violated", e.violations)?;
            }
            write!(f, ")")?;
            if let Some((name, v)) = &e.value {
                write!(f, " {name}={v}")?;
            }
            writeln!(f)?;
            for v in &e.witnesses {
                writeln!(f, "      at {}: {} {} {} fails", v.at, v.lhs, v.relation, v.rhs)?;
            }
            if !e.levels.is_empty() {
                let shown: Vec<String> = e
                    .levels
                    .iter()
                    .map(|l| match &l.value {
                        Some(v) => format!("{}:{}", l.r, v),
                        None => format!("{}:vacuous", l.r),
                    })
                    .collect();
                writeln!(f, "      levels {}", shown.join(" "))?;
            }
            if let Some(n) = &e.note {
                writeln!(f, "      {n}")?;
            }
        }
        if let Some(b) = &self.bound {
            writeln!(f, "  bound {b}")?;
        }
        for c in &self.caveats {
            writeln!(f, "  caveat: {c}")?;
        }
        Ok(())
    }
}
