//! Command-line front end. Exit codes: 0 success or Pass, 1 Fail, 2 usage or
//! input error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::approx::{bounded_reach_interval, bounded_reach_interval_with_majorant, simulate_return_probability, DEFAULT_STRIDE};
use crate::certificate::{casino, ValueFunction, Window};
use crate::chain::{Distribution, StateId};
use crate::model::{check_certificate, load_certificate, load_model, CertificateDocument, ChainSection, Model, ModelDocument, FORMAT_VERSION};
use crate::oracle::Oracle;
use crate::scalar::{parse_rational, rational_to_f64, Rational, Scalar};
use crate::synthesis::{
    default_threshold, synthesize_as_invariant, synthesize_decomposition, synthesize_invariant, synthesize_rule1,
    synthesize_rule2,
};

#[derive(Parser, Debug)]
#[command(name = "streett", version, about = "Exact Streett model checking and certificate checking for Markov chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact probability of the model's Streett condition (product with the automaton if declared).
    Solve {
        model: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check a certificate document against a model.
    Check {
        model: PathBuf,
        certificate: PathBuf,
        /// Integer window `lo..hi` for generated chains.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// Comma-separated r-levels, e.g. `0,1/2,1,2`.
        #[arg(long)]
        r_grid: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Synthesize a certificate document for a finite model.
    Synthesize {
        model: PathBuf,
        /// Threshold for absorbing regions, in (0,1).
        #[arg(long)]
        threshold: Option<String>,
        /// Use the invariant `{s : P_s(L) ≥ 1/(k+1)}` instead of the almost-sure one.
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, value_enum, default_value_t = RuleArg::Decomposition)]
        rule: RuleArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the expanded chain × automaton product as an explicit model.
    Product { model: PathBuf, out: PathBuf },
    /// Simulate a builtin family (or model file) and write the statistic as CSV.
    Simulate {
        family: String,
        #[arg(long = "param", value_parser = key_value)]
        params: Vec<(String, String)>,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        trajectories: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_STRIDE)]
        stride: usize,
        /// Value function recorded along the runs: casino-v1, max-plus-one or zero.
        #[arg(long, default_value = "casino-v1")]
        statistic: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Certified bracket of a hitting probability from truncated solves.
    Bound {
        family: String,
        #[arg(long = "param", value_parser = key_value)]
        params: Vec<(String, String)>,
        /// Name of the target region.
        #[arg(long)]
        target: String,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// Start state; defaults to the initial distribution.
        #[arg(long, allow_hyphen_values = true)]
        from: Option<String>,
        /// Value states outside the window by this majorant (casino-v1).
        #[arg(long)]
        majorant: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    Decomposition,
    Rule1,
    Rule2,
}

fn key_value(text: &str) -> Result<(String, String), String> {
    text.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("expected key=value, got {text:?}"))
}

fn int_window(text: &str) -> Result<(i64, i64)> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| anyhow!("window must look like lo..hi, got {text:?}"))?;
    let lo: i64 = lo.trim().parse().with_context(|| format!("bad window bound {lo:?}"))?;
    let hi: i64 = hi.trim().parse().with_context(|| format!("bad window bound {hi:?}"))?;
    if lo > hi {
        bail!("empty window {text:?}");
    }
    Ok((lo, hi))
}

/// A model file, or a builtin family name with `--param` values.
fn load_source(source: &str, params: &[(String, String)]) -> Result<Model> {
    let path = Path::new(source);
    if path.is_file() {
        if !params.is_empty() {
            bail!("--param applies to builtin families only");
        }
        return Ok(load_model(path)?);
    }
    let document = ModelDocument {
        format_version: FORMAT_VERSION,
        chain: ChainSection {
            builtin: Some(source.to_string()),
            params: params.iter().map(|(k, v)| (k.clone(), v.clone().into())).collect(),
            ..ChainSection::default()
        },
        labels: BTreeMap::new(),
        regions: BTreeMap::new(),
        streett: None,
        automaton: None,
    };
    Ok(Model::from_document(document)?)
}

fn family_param(model: &Model, name: &str) -> Result<Rational> {
    let value = model
        .document
        .chain
        .params
        .get(name)
        .ok_or_else(|| anyhow!("the family has no parameter {name}"))?;
    let text = match value {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    parse_rational(&text).map_err(|m| anyhow!(m))
}

fn named_function(model: &Model, name: &str) -> Result<ValueFunction> {
    match name {
        "casino-v1" => Ok(casino::v1(family_param(model, "eps")?)),
        "max-plus-one" => Ok(casino::max_plus_one()),
        "zero" => Ok(ValueFunction::zero()),
        other => bail!("unknown value function {other:?}"),
    }
}

enum Outcome {
    Success,
    Fail,
}

/// Parses `args` (program name first) and runs the command, writing to `out`
/// and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::Fail) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

pub fn main_with_args(args: impl IntoIterator<Item = OsString>) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Solve { model, json } => {
            let model = load_model(&model)?;
            let (chain, cond) = model.target()?;
            let p = Oracle::new(&chain)?.streett_probability(&cond);
            if json {
                writeln!(out, "{}", json!({ "probability": p.to_string(), "approx": rational_to_f64(&p) }))?;
            } else {
                writeln!(out, "{p}")?;
            }
            Ok(Outcome::Success)
        }
        Command::Check {
            model,
            certificate,
            window,
            r_grid,
            json,
        } => {
            let model = load_model(&model)?;
            let cert = load_certificate(&certificate)?;
            let window = window.map(|w| int_window(&w).map(|(lo, hi)| Window::int_range(lo, hi))).transpose()?;
            let r_grid = r_grid
                .map(|g| {
                    g.split(',')
                        .map(|r| parse_rational(r).map(Scalar::Exact).map_err(|m| anyhow!(m)))
                        .collect::<Result<Vec<_>>>()
                })
                .transpose()?;
            let report = check_certificate(&model, &cert, window, r_grid)?;
            if json {
                writeln!(out, "{}", report.to_json())?;
            } else {
                write!(out, "{report}")?;
            }
            Ok(if report.verdict.is_pass() { Outcome::Success } else { Outcome::Fail })
        }
        Command::Synthesize {
            model,
            threshold,
            k,
            rule,
            out: path,
        } => {
            let model = load_model(&model)?;
            let threshold = match threshold {
                Some(t) => parse_rational(&t).map_err(|m| anyhow!(m))?,
                None => default_threshold(),
            };
            let (chain, cond) = model.target()?;
            let invariant = match k {
                Some(k) => synthesize_invariant(&chain, &cond, k)?,
                None => {
                    let inv = synthesize_as_invariant(&chain, &cond)?;
                    if let Some(w) = &inv.warning {
                        writeln!(err, "warning: the condition holds with probability {} < 1", w.probability)?;
                    }
                    inv.region
                }
            };
            let witness = synthesize_decomposition(&chain, &cond, invariant, &threshold)?;
            let document = match rule {
                RuleArg::Decomposition => CertificateDocument::decomposition(&chain, &witness)?,
                RuleArg::Rule1 => CertificateDocument::rule1(&chain, &synthesize_rule1(&chain, &cond, &witness)?)?,
                RuleArg::Rule2 => CertificateDocument::rule2(&chain, &synthesize_rule2(&chain, &cond, &witness)?)?,
            };
            let text = document.to_json();
            match path {
                Some(p) => std::fs::write(&p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
                None => writeln!(out, "{text}")?,
            }
            Ok(Outcome::Success)
        }
        Command::Product { model, out: path } => {
            let model = load_model(&model)?;
            if model.automaton.is_none() {
                bail!("the model declares no automaton");
            }
            let document = model.expand_product()?;
            std::fs::write(&path, document.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
            writeln!(
                out,
                "wrote {} product states and {} pairs to {}",
                document.chain.states.len(),
                document.streett.as_ref().map_or(0, Vec::len),
                path.display()
            )?;
            Ok(Outcome::Success)
        }
        Command::Simulate {
            family,
            params,
            steps,
            trajectories,
            seed,
            stride,
            statistic,
            out: path,
        } => {
            let model = load_source(&family, &params)?;
            let statistic = named_function(&model, &statistic)?;
            let series = simulate_return_probability(&model.chain, &statistic, steps, trajectories, seed, stride)?;
            let file = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            series.write_csv(std::io::BufWriter::new(file))?;
            let finals = series.finals();
            let mean = finals.iter().sum::<f64>() / finals.len().max(1) as f64;
            writeln!(
                out,
                "seed {seed}: {trajectories} trajectories of {steps} steps; final mean {} = {mean:.6}; wrote {}",
                series.statistic,
                path.display()
            )?;
            Ok(Outcome::Success)
        }
        Command::Bound {
            family,
            params,
            target,
            window,
            from,
            majorant,
            json,
        } => {
            let model = load_source(&family, &params)?;
            let region = model
                .region(&target)
                .cloned()
                .ok_or_else(|| anyhow!("unknown region {target:?}"))?;
            let states: Vec<StateId> = match window {
                Some(w) => {
                    let (lo, hi) = int_window(&w)?;
                    (lo..=hi).map(StateId::Int).collect()
                }
                None => model
                    .chain
                    .states()
                    .map_err(|_| anyhow!("generated chains need --window"))?
                    .to_vec(),
            };
            let from = match from {
                Some(s) => Distribution::dirac(model.state(&s).map_err(|m| anyhow!(m))?),
                None => model.chain.initial().clone(),
            };
            let interval = match majorant {
                Some(name) => {
                    let v = named_function(&model, &name)?;
                    bounded_reach_interval_with_majorant(&model.chain, &region, &states, &from, &v)?
                }
                None => bounded_reach_interval(&model.chain, &region, &states, &from)?,
            };
            if json {
                writeln!(
                    out,
                    "{}",
                    json!({
                        "lower": interval.lower.to_string(),
                        "upper": interval.upper.to_string(),
                        "width": interval.width().to_string(),
                    })
                )?;
            } else {
                writeln!(
                    out,
                    "[{}, {}] width {:.3e}",
                    rational_to_f64(&interval.lower),
                    rational_to_f64(&interval.upper),
                    rational_to_f64(&interval.width())
                )?;
            }
            Ok(Outcome::Success)
        }
    }
}
