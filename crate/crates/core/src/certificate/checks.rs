use std::cmp::Ordering;

use num_traits::{One, Zero};

use super::functions::{
    DecompositionWitness, MonotoneScalarFunction, RankingFunction, Rule1Bundle, Rule2Bundle, ValueFunction,
};
use super::report::{CheckReport, ConditionEntry, EntryBuilder, LevelValue, Relation, Witness};
use super::CertError;
use crate::chain::{Distribution, MarkovChain, Region, StateId};
use crate::omega::StreettCondition;
use crate::oracle::Oracle;
use crate::scalar::{Rational, Scalar, APPROX_TOLERANCE};

/// States on which universally quantified conditions are verified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Window {
    /// All states of a finite chain.
    Universe,
    States(Vec<StateId>),
}

impl Window {
    /// Integer states `lo..=hi`.
    pub fn int_range(lo: i64, hi: i64) -> Self {
        Window::States((lo..=hi).map(StateId::Int).collect())
    }

    fn resolve(&self, chain: &MarkovChain) -> Result<(Vec<StateId>, bool, Option<String>), CertError> {
        match self {
            Window::Universe => {
                let states = chain.states().map_err(|_| CertError::WindowRequired)?.to_vec();
                Ok((states, false, None))
            }
            Window::States(states) => {
                let mut states = states.clone();
                states.sort();
                states.dedup();
                let partial = match chain.states() {
                    Ok(all) => all.iter().any(|s| states.binary_search(s).is_err()),
                    Err(_) => true,
                };
                Ok((states.clone(), partial, Some(describe(&states))))
            }
        }
    }
}

fn describe(states: &[StateId]) -> String {
    let ints: Option<Vec<i64>> = states.iter().map(StateId::as_int).collect();
    match ints {
        Some(v) if !v.is_empty() && v.windows(2).all(|w| w[1] == w[0] + 1) => {
            format!("[{}, {}]", v[0], v[v.len() - 1])
        }
        _ => format!("{} states", states.len()),
    }
}

/// Minimum margins for the strict inequalities (`γ > 0`, `ε_r > 0`, `W > 0`).
#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub exact_margin: Rational,
    pub approx_margin: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            exact_margin: Rational::zero(),
            approx_margin: APPROX_TOLERANCE,
        }
    }
}

impl CheckOptions {
    fn margin_for(&self, v: &Scalar) -> Scalar {
        match v {
            Scalar::Exact(_) => Scalar::Exact(self.exact_margin.clone()),
            Scalar::Approx(_) => Scalar::Approx(self.approx_margin),
        }
    }
}

/// A chain, a window and cached kernel rows for the window states.
pub struct Checker<'a> {
    chain: &'a MarkovChain,
    window: Window,
    options: CheckOptions,
}

struct Ctx {
    states: Vec<StateId>,
    rows: Vec<Distribution>,
    partial: bool,
    label: Option<String>,
}

impl Ctx {
    fn iter(&self) -> impl Iterator<Item = (&StateId, &Distribution)> {
        self.states.iter().zip(&self.rows)
    }
}

fn post(row: &Distribution, v: &ValueFunction) -> Result<Scalar, CertError> {
    let mut acc = Scalar::zero();
    for (u, p) in row.iter() {
        acc = acc.add(&v.eval(u)?.mul_rational(p));
    }
    Ok(acc)
}

fn at(s: &StateId) -> Witness {
    Witness::State { state: s.clone() }
}

impl<'a> Checker<'a> {
    pub fn new(chain: &'a MarkovChain) -> Self {
        Checker {
            chain,
            window: Window::Universe,
            options: CheckOptions::default(),
        }
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    pub fn with_options(mut self, options: CheckOptions) -> Self {
        self.options = options;
        self
    }

    fn ctx(&self) -> Result<Ctx, CertError> {
        let (states, partial, label) = self.window.resolve(self.chain)?;
        let rows = states
            .iter()
            .map(|s| self.chain.successors(s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Ctx {
            partial: partial || !self.chain.is_finite(),
            states,
            rows,
            label,
        })
    }

    fn init_expectation(&self, v: &ValueFunction) -> Result<Scalar, CertError> {
        post(self.chain.initial(), v)
    }

    fn quant_entries(
        &self,
        ctx: &Ctx,
        x: &Region,
        v: &ValueFunction,
        tags: [&str; 2],
    ) -> Result<Vec<ConditionEntry>, CertError> {
        let mut dec = EntryBuilder::new(tags[0], None);
        let mut outside = EntryBuilder::new(tags[1], None);
        for (s, row) in ctx.iter() {
            if x.contains(s) {
                dec.require(at(s), post(row, v)?, Relation::Le, v.eval(s)?);
            } else {
                outside.require(at(s), v.eval(s)?, Relation::Ge, Scalar::one());
            }
        }
        Ok(vec![dec.finish(), outside.finish()])
    }

    fn qual_entries(
        &self,
        ctx: &Ctx,
        a: &Region,
        j: &Region,
        v: &ValueFunction,
        gamma: Option<&Scalar>,
        tags: [&str; 3],
        pair: Option<usize>,
    ) -> Result<Vec<ConditionEntry>, CertError> {
        if let Some(s) = ctx.states.iter().find(|s| a.contains(s) && j.contains(s)) {
            return Err(CertError::DisjointnessViolation(s.clone()));
        }
        let mut dec = EntryBuilder::new(tags[0], pair);
        let mut on_a = EntryBuilder::new(tags[1], pair);
        let mut gap = EntryBuilder::new(tags[2], pair);
        let mut in_j = Vec::new();
        for (s, row) in ctx.iter() {
            let vs = v.eval(s)?;
            if a.contains(s) {
                on_a.require(at(s), vs.clone(), Relation::Ge, Scalar::one());
            } else {
                dec.require(at(s), post(row, v)?, Relation::Le, vs.clone());
            }
            if j.contains(s) {
                in_j.push((s, vs));
            }
        }
        match gamma {
            Some(g) => {
                gap.require(
                    Witness::Level { r: g.clone() },
                    g.clone(),
                    Relation::Gt,
                    self.options.margin_for(g),
                );
                let cap = Scalar::one().sub(g);
                for (s, vs) in &in_j {
                    gap.require(at(s), vs.clone(), Relation::Le, cap.clone());
                }
                gap.value("gamma", g.clone());
            }
            None => {
                let sup = in_j
                    .iter()
                    .map(|(_, vs)| vs.clone())
                    .reduce(Scalar::max)
                    .unwrap_or_else(Scalar::zero);
                let g = Scalar::one().sub(&sup);
                let cap = Scalar::one().sub(&self.options.margin_for(&g));
                for (s, vs) in &in_j {
                    gap.require(at(s), vs.clone(), Relation::Lt, cap.clone());
                }
                gap.value("gamma", g);
                gap.note("γ inferred as 1 − sup of V over the absorbing region");
            }
        }
        Ok(vec![dec.finish(), on_a.finish(), gap.finish()])
    }

    /// Quantitative safety: `PV ≤ V` on `X` and `V ≥ 1` off `X` give
    /// `P(X^ω) ≥ 1 − μV`.
    pub fn quant_safety(&self, x: &Region, v: &ValueFunction) -> Result<CheckReport, CertError> {
        let ctx = self.ctx()?;
        let entries = self.quant_entries(&ctx, x, v, ["QuantSafety/Eq.61", "QuantSafety/Eq.62"])?;
        let bound = Scalar::one().sub(&self.init_expectation(v)?);
        Ok(CheckReport::assemble(
            "quant-safety",
            entries,
            Some(bound),
            ctx.label,
            ctx.partial,
            Vec::new(),
        ))
    }

    /// Qualitative safety: `PV ≤ V` off `A`, `V ≥ 1` on `A`, and
    /// `γ = 1 − sup_J V > 0`.
    pub fn qual_safety(&self, a: &Region, j: &Region, v: &ValueFunction) -> Result<CheckReport, CertError> {
        self.qual_safety_with_gamma(a, j, v, None)
    }

    /// As [`Checker::qual_safety`] with a declared `γ`, checked as `γ > 0`
    /// and `V ≤ 1 − γ` on `J`.
    pub fn qual_safety_with_gamma(
        &self,
        a: &Region,
        j: &Region,
        v: &ValueFunction,
        gamma: Option<&Scalar>,
    ) -> Result<CheckReport, CertError> {
        let ctx = self.ctx()?;
        let entries = self.qual_entries(
            &ctx,
            a,
            j,
            v,
            gamma,
            ["QualSafety/Eq.63", "QualSafety/Eq.64", "QualSafety/Eq.65"],
            None,
        )?;
        Ok(CheckReport::assemble("qual-safety", entries, None, ctx.label, ctx.partial, Vec::new()))
    }

    fn pair_count(cond: &StreettCondition, witness: &DecompositionWitness, certs: usize) -> Result<(), CertError> {
        for found in [witness.absorbing.len(), certs] {
            if found != cond.len() {
                return Err(CertError::PairCountMismatch {
                    expected: cond.len(),
                    found,
                });
            }
        }
        Ok(())
    }

    fn termination_shape(
        &self,
        ctx: &Ctx,
        invariant: &Region,
        target: &Region,
        w: &ValueFunction,
        u: Option<&RankingFunction>,
        tags: [&str; 3],
        pair: usize,
    ) -> Result<Vec<ConditionEntry>, CertError> {
        let mut sup = EntryBuilder::new(tags[0], Some(pair));
        let mut pos = EntryBuilder::new(tags[1], Some(pair));
        let mut zero = EntryBuilder::new(tags[2], Some(pair));
        for (s, row) in ctx.iter() {
            if !invariant.contains(s) {
                continue;
            }
            let ws = w.eval(s)?;
            if target.contains(s) {
                zero.require(at(s), ws, Relation::Eq, Scalar::zero());
                if let Some(u) = u {
                    zero.require(at(s), Scalar::Exact(Rational::from_integer(u.eval(s)?.into())), Relation::Eq, Scalar::zero());
                }
            } else {
                let margin = self.options.margin_for(&ws);
                pos.require(at(s), ws.clone(), Relation::Gt, margin);
                sup.require(at(s), post(row, w)?, Relation::Le, ws);
            }
        }
        Ok(vec![sup.finish(), pos.finish(), zero.finish()])
    }

    /// Proof rule with supermartingale `W_i` and ranking function `U_i`.
    pub fn rule1(
        &self,
        cond: &StreettCondition,
        bundle: &Rule1Bundle,
        r_grid: &[Scalar],
    ) -> Result<CheckReport, CertError> {
        if r_grid.is_empty() {
            return Err(CertError::EmptyRGrid);
        }
        Self::pair_count(cond, &bundle.witness, bundle.pairs.len())?;
        let ctx = self.ctx()?;
        let inv = &bundle.witness.invariant;
        let mut entries = Vec::new();
        let mut caveats = Vec::new();
        for (i, ((a, b), (j, cert))) in cond
            .pairs()
            .iter()
            .zip(bundle.witness.absorbing.iter().zip(&bundle.pairs))
            .enumerate()
        {
            let pair = i + 1;
            entries.extend(self.qual_entries(
                &ctx,
                a,
                j,
                &cert.v,
                cert.gamma.as_ref(),
                ["Rule1/Eq.67", "Rule1/Eq.68", "Rule1/Eq.69"],
                Some(pair),
            )?);
            let target = b.union(j);
            entries.extend(self.termination_shape(
                &ctx,
                inv,
                &target,
                &cert.w,
                Some(&cert.u),
                ["Rule1/Eq.70", "Rule1/Eq.71", "Rule1/Eq.72"],
                pair,
            )?);

            // Eq.73: ε_r = min P(s, {U' < U(s)}) over the W-sublevel set.
            let mut eq73 = EntryBuilder::new("Rule1/Eq.73", Some(pair));
            let mut points: Vec<(Scalar, Rational)> = Vec::new();
            for (s, row) in ctx.iter() {
                if !inv.contains(s) || target.contains(s) {
                    continue;
                }
                let us = cert.u.eval(s)?;
                let mut dec = Rational::zero();
                for (v, p) in row.iter() {
                    if cert.u.eval(v)? < us {
                        dec += p;
                    }
                }
                eq73.require(at(s), Scalar::Exact(dec.clone()), Relation::Gt, Scalar::zero());
                points.push((cert.w.eval(s)?, dec));
            }
            points.sort_by(|x, y| x.0.total_cmp(&y.0));
            let levels = merged_levels(r_grid, points.iter().map(|(w, _)| w.clone()), false);
            let mut values = Vec::with_capacity(levels.len());
            let mut k = 0;
            let mut running: Option<Rational> = None;
            for r in &levels {
                while k < points.len() && points[k].0.total_cmp(r) != Ordering::Greater {
                    running = Some(match running {
                        Some(m) if m <= points[k].1 => m,
                        _ => points[k].1.clone(),
                    });
                    k += 1;
                }
                values.push(LevelValue {
                    r: r.clone(),
                    value: running.clone().map(Scalar::Exact),
                });
            }
            let on_grid: Vec<LevelValue> = values
                .into_iter()
                .filter(|l| r_grid.iter().any(|g| g.total_cmp(&l.r) == Ordering::Equal))
                .collect();
            eq73.levels(on_grid);
            eq73.note(format!(
                "verified on {} grid levels and {} achieved W-values",
                r_grid.len(),
                levels.len()
            ));
            entries.push(eq73.finish());

            // Eq.74: U is bounded on each W-sublevel set of the window.
            let mut eq74 = EntryBuilder::new("Rule1/Eq.74", Some(pair));
            let mut max_u = 0u64;
            for s in ctx.states.iter().filter(|s| inv.contains(s)) {
                max_u = max_u.max(cert.u.eval(s)?);
            }
            eq74.value("max-U", Scalar::Exact(Rational::from_integer(max_u.into())));
            if ctx.partial {
                eq74.note("finite on the window; unbounded growth outside it is not checked");
                caveats.push(format!(
                    "Rule1/Eq.74 pair {pair}: boundedness of U on W-sublevel sets holds on the window only"
                ));
            }
            entries.push(eq74.finish());
        }
        entries.extend(self.quant_entries(&ctx, inv, &bundle.v0, ["Rule1/Eq.75", "Rule1/Eq.76"])?);
        let bound = Scalar::one().sub(&self.init_expectation(&bundle.v0)?);
        Ok(CheckReport::assemble("rule1", entries, Some(bound), ctx.label, ctx.partial, caveats))
    }

    /// Proof rule with supermartingale `W_i` and drift functions `d_i`, `p_i`.
    pub fn rule2(
        &self,
        cond: &StreettCondition,
        bundle: &Rule2Bundle,
        r_grid: &[Scalar],
    ) -> Result<CheckReport, CertError> {
        if r_grid.is_empty() {
            return Err(CertError::EmptyRGrid);
        }
        Self::pair_count(cond, &bundle.witness, bundle.pairs.len())?;
        let ctx = self.ctx()?;
        let inv = &bundle.witness.invariant;
        let mut entries = Vec::new();
        for (i, ((a, b), (j, cert))) in cond
            .pairs()
            .iter()
            .zip(bundle.witness.absorbing.iter().zip(&bundle.pairs))
            .enumerate()
        {
            let pair = i + 1;
            entries.extend(self.qual_entries(
                &ctx,
                a,
                j,
                &cert.v,
                cert.gamma.as_ref(),
                ["Rule2/Eq.77", "Rule2/Eq.78", "Rule2/Eq.79"],
                Some(pair),
            )?);
            let target = b.union(j);
            let mut shape = self.termination_shape(
                &ctx,
                inv,
                &target,
                &cert.w,
                None,
                ["Rule2/Eq.82", "Rule2/Eq.80", "Rule2/Eq.81"],
                pair,
            )?;
            // Report in equation order: positivity, zero, supermartingale.
            shape.rotate_left(1);
            entries.extend(shape);

            let mut drift = EntryBuilder::new("Rule2/Eq.83", Some(pair));
            let mut achieved = Vec::new();
            for (s, row) in ctx.iter() {
                if !inv.contains(s) || target.contains(s) {
                    continue;
                }
                let r = cert.w.eval(s)?;
                if !r.check_gt(&Scalar::zero()).holds {
                    continue;
                }
                let level = r.sub(&cert.d.eval(&r));
                let mut mass = Scalar::zero();
                for (u, p) in row.iter() {
                    if cert.w.eval(u)?.check_le(&level).holds {
                        mass = mass.add(&Scalar::Exact(p.clone()));
                    }
                }
                drift.require(at(s), mass, Relation::Ge, cert.p.eval(&r));
                achieved.push(r);
            }
            entries.push(drift.finish());
            let levels = merged_levels(r_grid, achieved.into_iter(), true);
            entries.push(antitone("Rule2/Eq.84", pair, &cert.p, &levels, true));
            entries.push(antitone("Rule2/Eq.85", pair, &cert.d, &levels, false));
        }
        entries.extend(self.quant_entries(&ctx, inv, &bundle.v0, ["Rule2/Eq.86", "Rule2/Eq.87"])?);
        let bound = Scalar::one().sub(&self.init_expectation(&bundle.v0)?);
        Ok(CheckReport::assemble("rule2", entries, Some(bound), ctx.label, ctx.partial, Vec::new()))
    }
}

/// Sorted, de-duplicated union of the grid and the achieved values.
fn merged_levels(grid: &[Scalar], achieved: impl Iterator<Item = Scalar>, positive_only: bool) -> Vec<Scalar> {
    let mut levels: Vec<Scalar> = grid.iter().cloned().chain(achieved).collect();
    if positive_only {
        levels.retain(|r| r.check_gt(&Scalar::zero()).holds);
    }
    levels.sort_by(|a, b| a.total_cmp(b));
    levels.dedup_by(|a, b| a.total_cmp(b) == Ordering::Equal);
    levels
}

/// Pairwise antitonicity of `f` on `levels`, plus its range: probabilities in
/// `(0, 1]`, decreases positive.
fn antitone(tag: &str, pair: usize, f: &MonotoneScalarFunction, levels: &[Scalar], probability: bool) -> ConditionEntry {
    let mut entry = EntryBuilder::new(tag, Some(pair));
    let values: Vec<Scalar> = levels.iter().map(|r| f.eval(r)).collect();
    for (r, v) in levels.iter().zip(&values) {
        let w = Witness::Level { r: r.clone() };
        entry.require(w.clone(), v.clone(), Relation::Gt, Scalar::zero());
        if probability {
            entry.require(w, v.clone(), Relation::Le, Scalar::one());
        }
    }
    for i in 0..levels.len() {
        for k in i + 1..levels.len() {
            entry.require(
                Witness::Levels {
                    r1: levels[i].clone(),
                    r2: levels[k].clone(),
                },
                values[i].clone(),
                Relation::Ge,
                values[k].clone(),
            );
        }
    }
    entry.note(format!("checked pairwise on {} levels", levels.len()));
    entry.finish()
}

pub fn check_quant_safety(
    chain: &MarkovChain,
    x: &Region,
    v: &ValueFunction,
    window: &Window,
) -> Result<CheckReport, CertError> {
    Checker::new(chain).with_window(window.clone()).quant_safety(x, v)
}

pub fn check_qual_safety(
    chain: &MarkovChain,
    a: &Region,
    j: &Region,
    v: &ValueFunction,
    window: &Window,
) -> Result<CheckReport, CertError> {
    Checker::new(chain).with_window(window.clone()).qual_safety(a, j, v)
}

pub fn check_rule1(
    chain: &MarkovChain,
    cond: &StreettCondition,
    bundle: &Rule1Bundle,
    window: &Window,
    r_grid: &[Scalar],
) -> Result<CheckReport, CertError> {
    Checker::new(chain).with_window(window.clone()).rule1(cond, bundle, r_grid)
}

pub fn check_rule2(
    chain: &MarkovChain,
    cond: &StreettCondition,
    bundle: &Rule2Bundle,
    window: &Window,
    r_grid: &[Scalar],
) -> Result<CheckReport, CertError> {
    Checker::new(chain).with_window(window.clone()).rule2(cond, bundle, r_grid)
}

/// Semantic check of an absorbing-region decomposition on a finite chain:
/// `J_i ⊆ I ∖ A_i`, `sup_{J_i} P(σ_{A_i} < ∞) < 1` and
/// `inf_I P(σ_{B_i ∪ J_i ∪ I^c} < ∞) = 1`, with bound `P_μ(I^ω)`.
pub fn check_decomposition_semantic(
    chain: &MarkovChain,
    cond: &StreettCondition,
    witness: &DecompositionWitness,
) -> Result<CheckReport, CertError> {
    let oracle = Oracle::new(chain)?;
    decomposition_with(&oracle, cond, witness)
}

pub fn decomposition_with(
    oracle: &Oracle,
    cond: &StreettCondition,
    witness: &DecompositionWitness,
) -> Result<CheckReport, CertError> {
    if witness.absorbing.len() != cond.len() {
        return Err(CertError::PairCountMismatch {
            expected: cond.len(),
            found: witness.absorbing.len(),
        });
    }
    let inv = &witness.invariant;
    let exact = |r: &Rational| Scalar::Exact(r.clone());
    let mut entries = Vec::new();
    for (i, ((a, b), j)) in cond.pairs().iter().zip(&witness.absorbing).enumerate() {
        let pair = Some(i + 1);
        let mut contained = EntryBuilder::new("Thm3.5/J⊆I∖A", pair);
        let mut eq17 = EntryBuilder::new("Thm3.5/Eq.17", pair);
        let mut eq18 = EntryBuilder::new("Thm3.5/Eq.18", pair);
        let returns = oracle.return_vector(a);
        let exits = oracle.return_vector(&b.union(j).union(&inv.complement()));
        let mut sup = Rational::zero();
        let mut inf = Rational::one();
        for s in oracle.states() {
            let indicator = |x: bool| Scalar::Exact(if x { Rational::one() } else { Rational::zero() });
            if j.contains(s) {
                contained.require(at(s), Scalar::one(), Relation::Le, indicator(inv.contains(s) && !a.contains(s)));
                let r = &returns[s];
                eq17.require(at(s), exact(r), Relation::Lt, Scalar::one());
                if *r > sup {
                    sup = r.clone();
                }
            }
            if inv.contains(s) {
                let e = &exits[s];
                eq18.require(at(s), exact(e), Relation::Eq, Scalar::one());
                if *e < inf {
                    inf = e.clone();
                }
            }
        }
        eq17.value("sup", Scalar::Exact(sup));
        eq18.value("inf", Scalar::Exact(inf));
        entries.extend([contained.finish(), eq17.finish(), eq18.finish()]);
    }
    let bound = Scalar::Exact(oracle.stay_probability(inv));
    Ok(CheckReport::assemble("decomposition", entries, Some(bound), None, false, Vec::new()))
}
