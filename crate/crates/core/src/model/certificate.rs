use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::document::{resolve_state, Model, RegionRef, RegionSpec};
use super::{from_json, param_text, to_json, ModelError, FORMAT_VERSION};
use crate::certificate::{
    casino, CertError, CheckReport, Checker, DecompositionWitness, EvaluationError, MonotoneScalarFunction,
    RankingFunction, Role, Rule1Bundle, Rule1Pair, Rule2Bundle, Rule2Pair, ValueFunction, Window,
};
use crate::chain::{MarkovChain, Region, StateId};
use crate::oracle::Oracle;
use crate::scalar::{int, parse_rational, Rational, Scalar};

/// r-levels used when neither the document nor the caller gives any.
pub const DEFAULT_R_GRID: [i64; 11] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleTag {
    QuantSafety,
    QualSafety,
    Decomposition,
    Rule1,
    Rule2,
}

/// A function given as a constant, an explicit table, or a builtin.
///
/// Value-function builtins: `zero`, `const` (`value`), `casino-v1` (`eps`),
/// `max-plus-one`. Ranking builtins: `const`, `max-plus-one`. Builtins for
/// `d` and `p`: `const` (`value`), `min-one` (`r ↦ min(1, r)`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Constant(Scalar),
    Table {
        table: BTreeMap<String, Scalar>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default: Option<Scalar>,
    },
    Builtin {
        builtin: String,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        params: BTreeMap<String, Value>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowSpec {
    Range { lo: i64, hi: i64 },
    States(Vec<String>),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairCertificate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Scalar>,
}

/// Certificates for one proof rule, checked against a model.
///
/// `quant-safety` uses `x` and `v`; `qual-safety` uses `a`, `j`, `v` and
/// optionally `gamma`; `decomposition` uses `invariant` and `absorbing`;
/// `rule1` and `rule2` additionally use `v0` and one `pairs` entry per
/// Streett pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDocument {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub rule: RuleTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<RegionRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<RegionRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<RegionRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariant: Option<RegionRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub absorbing: Vec<RegionRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<PairCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub r_grid: Vec<Scalar>,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

impl CertificateDocument {
    pub fn new(rule: RuleTag) -> Self {
        CertificateDocument {
            format_version: FORMAT_VERSION,
            rule,
            x: None,
            a: None,
            j: None,
            v: None,
            gamma: None,
            invariant: None,
            absorbing: Vec::new(),
            v0: None,
            pairs: Vec::new(),
            window: None,
            r_grid: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: Self = from_json(text)?;
        if doc.format_version != FORMAT_VERSION {
            return Err(ModelError::invalid(
                "format_version",
                format!("unsupported version {}", doc.format_version),
            ));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Decomposition document with enumerated regions.
    pub fn decomposition(chain: &MarkovChain, witness: &DecompositionWitness) -> Result<Self, ModelError> {
        let mut doc = CertificateDocument::new(RuleTag::Decomposition);
        doc.invariant = Some(enumerate(chain, &witness.invariant)?);
        doc.absorbing = witness
            .absorbing
            .iter()
            .map(|j| enumerate(chain, j))
            .collect::<Result<_, _>>()?;
        Ok(doc)
    }

    /// Rule-1 document with every function tabulated on the chain's states.
    pub fn rule1(chain: &MarkovChain, bundle: &Rule1Bundle) -> Result<Self, ModelError> {
        let mut doc = Self::decomposition(chain, &bundle.witness)?;
        doc.rule = RuleTag::Rule1;
        doc.v0 = Some(tabulate(chain, &bundle.v0)?);
        for p in &bundle.pairs {
            let states = finite_states(chain)?;
            let mut u = BTreeMap::new();
            for s in states {
                u.insert(s.to_string(), Scalar::Exact(int(p.u.eval(s).map_err(eval_error)? as i64)));
            }
            doc.pairs.push(PairCertificate {
                v: Some(tabulate(chain, &p.v)?),
                w: Some(tabulate(chain, &p.w)?),
                u: Some(FunctionSpec::Table { table: u, default: None }),
                gamma: p.gamma.clone(),
                ..PairCertificate::default()
            });
        }
        Ok(doc)
    }

    /// Rule-2 document; `d` and `p` must be constants.
    pub fn rule2(chain: &MarkovChain, bundle: &Rule2Bundle) -> Result<Self, ModelError> {
        let mut doc = Self::decomposition(chain, &bundle.witness)?;
        doc.rule = RuleTag::Rule2;
        doc.v0 = Some(tabulate(chain, &bundle.v0)?);
        let one = Scalar::one();
        for p in &bundle.pairs {
            doc.pairs.push(PairCertificate {
                v: Some(tabulate(chain, &p.v)?),
                w: Some(tabulate(chain, &p.w)?),
                d: Some(FunctionSpec::Constant(p.d.eval(&one))),
                p: Some(FunctionSpec::Constant(p.p.eval(&one))),
                gamma: p.gamma.clone(),
                ..PairCertificate::default()
            });
        }
        Ok(doc)
    }
}

fn eval_error(e: EvaluationError) -> ModelError {
    ModelError::Check(CertError::Evaluation(e))
}

fn finite_states(chain: &MarkovChain) -> Result<&[StateId], ModelError> {
    chain
        .states()
        .map_err(|_| ModelError::invalid("chain", "tables can only be written for finite chains"))
}

fn enumerate(chain: &MarkovChain, region: &Region) -> Result<RegionRef, ModelError> {
    let states = finite_states(chain)?;
    Ok(RegionRef::Inline(RegionSpec::States(
        region.members_in(states).iter().map(|s| s.to_string()).collect(),
    )))
}

fn tabulate(chain: &MarkovChain, f: &ValueFunction) -> Result<FunctionSpec, ModelError> {
    let table = f.tabulate(finite_states(chain)?).map_err(eval_error)?;
    Ok(FunctionSpec::Table {
        table: table.into_iter().map(|(s, v)| (s.to_string(), v)).collect(),
        default: None,
    })
}

fn param(params: &BTreeMap<String, Value>, name: &str, path: &str) -> Result<Rational, ModelError> {
    let text = param_text(params)
        .remove(name)
        .ok_or_else(|| ModelError::invalid(format!("{path}.params"), format!("missing {name}")))?;
    parse_rational(&text).map_err(|m| ModelError::invalid(format!("{path}.params.{name}"), m))
}

fn table_keys<T>(
    chain: &MarkovChain,
    table: &BTreeMap<String, T>,
    path: &str,
) -> Result<BTreeMap<StateId, T>, ModelError>
where
    T: Clone,
{
    table
        .iter()
        .map(|(k, v)| {
            resolve_state(chain, k)
                .map(|s| (s, v.clone()))
                .map_err(|m| ModelError::invalid(format!("{path}.table.{k}"), m))
        })
        .collect()
}

fn value_function(chain: &MarkovChain, spec: &FunctionSpec, name: &str, path: &str) -> Result<ValueFunction, ModelError> {
    match spec {
        FunctionSpec::Constant(c) => Ok(ValueFunction::constant(name, c.clone())),
        FunctionSpec::Table { table, default } => Ok(ValueFunction::table(
            name,
            table_keys(chain, table, path)?,
            default.clone(),
        )),
        FunctionSpec::Builtin { builtin, params } => match builtin.as_str() {
            "zero" => Ok(ValueFunction::zero()),
            "const" => Ok(ValueFunction::constant(name, Scalar::Exact(param(params, "value", path)?))),
            "casino-v1" => Ok(casino::v1(param(params, "eps", path)?)),
            "max-plus-one" => Ok(casino::max_plus_one()),
            other => Err(ModelError::invalid(format!("{path}.builtin"), format!("unknown value function {other:?}"))),
        },
    }
}

fn natural(value: &Scalar, path: &str) -> Result<u64, ModelError> {
    match value.as_exact() {
        Some(r) if r.is_integer() && *r >= Rational::from_integer(0.into()) => {
            u64::try_from(r.to_integer()).map_err(|e| ModelError::invalid(path, e))
        }
        _ => Err(ModelError::invalid(path, format!("{value} is not a natural number"))),
    }
}

fn ranking_function(chain: &MarkovChain, spec: &FunctionSpec, name: &str, path: &str) -> Result<RankingFunction, ModelError> {
    match spec {
        FunctionSpec::Constant(c) => Ok(RankingFunction::constant(natural(c, path)?)),
        FunctionSpec::Table { table, default } => {
            let mut values = BTreeMap::new();
            for (s, v) in table_keys(chain, table, path)? {
                let n = natural(&v, &format!("{path}.table.{s}"))?;
                values.insert(s, n);
            }
            let default = default.as_ref().map(|d| natural(d, &format!("{path}.default"))).transpose()?;
            Ok(RankingFunction::table(name, values, default))
        }
        FunctionSpec::Builtin { builtin, params } => match builtin.as_str() {
            "max-plus-one" => Ok(casino::max_plus_one_rank()),
            "const" => Ok(RankingFunction::constant(natural(&Scalar::Exact(param(params, "value", path)?), path)?)),
            other => Err(ModelError::invalid(format!("{path}.builtin"), format!("unknown ranking function {other:?}"))),
        },
    }
}

fn scalar_function(spec: &FunctionSpec, role: Role, path: &str) -> Result<MonotoneScalarFunction, ModelError> {
    match spec {
        FunctionSpec::Constant(c) => Ok(MonotoneScalarFunction::constant(role, c.clone())),
        FunctionSpec::Table { .. } => Err(ModelError::invalid(path, "d and p cannot be tables")),
        FunctionSpec::Builtin { builtin, params } => match builtin.as_str() {
            "const" => Ok(MonotoneScalarFunction::constant(role, Scalar::Exact(param(params, "value", path)?))),
            "min-one" => Ok(MonotoneScalarFunction::new("min-one", role, |r| r.clone().min(Scalar::one()))),
            other => Err(ModelError::invalid(format!("{path}.builtin"), format!("unknown function {other:?}"))),
        },
    }
}

fn required<'a, T>(field: &'a Option<T>, path: &str) -> Result<&'a T, ModelError> {
    field.as_ref().ok_or_else(|| ModelError::invalid(path, "missing"))
}

/// Window and r-grid given on the command line take precedence over the
/// document's.
pub fn check_certificate(
    model: &Model,
    cert: &CertificateDocument,
    window: Option<Window>,
    r_grid: Option<Vec<Scalar>>,
) -> Result<CheckReport, ModelError> {
    let (target, cond) = model.target()?;
    let chain = &target;
    let window = match (window, &cert.window) {
        (Some(w), _) => w,
        (None, Some(WindowSpec::Range { lo, hi })) => Window::int_range(*lo, *hi),
        (None, Some(WindowSpec::States(names))) => Window::States(
            names
                .iter()
                .enumerate()
                .map(|(i, n)| resolve_state(chain, n).map_err(|m| ModelError::invalid(format!("window[{i}]"), m)))
                .collect::<Result<_, _>>()?,
        ),
        (None, None) => Window::Universe,
    };
    let r_grid = r_grid.unwrap_or_else(|| {
        if cert.r_grid.is_empty() {
            DEFAULT_R_GRID.iter().map(|&r| Scalar::Exact(int(r))).collect()
        } else {
            cert.r_grid.clone()
        }
    });
    let checker = Checker::new(chain).with_window(window);
    let region = |r: &Option<RegionRef>, name: &str| model.resolve_region(chain, required(r, name)?, name, name);
    let report = match cert.rule {
        RuleTag::QuantSafety => {
            let v = value_function(chain, required(&cert.v, "v")?, "V", "v")?;
            checker.quant_safety(&region(&cert.x, "x")?, &v)?
        }
        RuleTag::QualSafety => {
            let v = value_function(chain, required(&cert.v, "v")?, "V", "v")?;
            let (a, j) = (region(&cert.a, "a")?, region(&cert.j, "j")?);
            checker.qual_safety_with_gamma(&a, &j, &v, cert.gamma.as_ref())?
        }
        RuleTag::Decomposition => {
            let witness = witness(model, chain, cert)?;
            let oracle = Oracle::new(chain).map_err(CertError::from)?;
            crate::certificate::decomposition_with(&oracle, &cond, &witness)?
        }
        RuleTag::Rule1 => {
            let bundle = Rule1Bundle {
                witness: witness(model, chain, cert)?,
                v0: value_function(chain, required(&cert.v0, "v0")?, "V0", "v0")?,
                pairs: cert
                    .pairs
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let path = |f: &str| format!("pairs[{i}].{f}");
                        let name = |f: &str| format!("{f}{}", i + 1);
                        Ok(Rule1Pair {
                            v: value_function(chain, required(&p.v, &path("v"))?, &name("V"), &path("v"))?,
                            w: value_function(chain, required(&p.w, &path("w"))?, &name("W"), &path("w"))?,
                            u: ranking_function(chain, required(&p.u, &path("u"))?, &name("U"), &path("u"))?,
                            gamma: p.gamma.clone(),
                        })
                    })
                    .collect::<Result<_, ModelError>>()?,
            };
            checker.rule1(&cond, &bundle, &r_grid)?
        }
        RuleTag::Rule2 => {
            let bundle = Rule2Bundle {
                witness: witness(model, chain, cert)?,
                v0: value_function(chain, required(&cert.v0, "v0")?, "V0", "v0")?,
                pairs: cert
                    .pairs
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let path = |f: &str| format!("pairs[{i}].{f}");
                        let name = |f: &str| format!("{f}{}", i + 1);
                        Ok(Rule2Pair {
                            v: value_function(chain, required(&p.v, &path("v"))?, &name("V"), &path("v"))?,
                            w: value_function(chain, required(&p.w, &path("w"))?, &name("W"), &path("w"))?,
                            d: scalar_function(required(&p.d, &path("d"))?, Role::Decrease, &path("d"))?,
                            p: scalar_function(required(&p.p, &path("p"))?, Role::Probability, &path("p"))?,
                            gamma: p.gamma.clone(),
                        })
                    })
                    .collect::<Result<_, ModelError>>()?,
            };
            checker.rule2(&cond, &bundle, &r_grid)?
        }
    };
    Ok(report)
}

fn witness(model: &Model, chain: &MarkovChain, cert: &CertificateDocument) -> Result<DecompositionWitness, ModelError> {
    let invariant = model.resolve_region(chain, required(&cert.invariant, "invariant")?, "I", "invariant")?;
    let absorbing = cert
        .absorbing
        .iter()
        .enumerate()
        .map(|(i, r)| model.resolve_region(chain, r, &format!("J{}", i + 1), &format!("absorbing[{i}]")))
        .collect::<Result<_, _>>()?;
    Ok(DecompositionWitness { invariant, absorbing })
}
