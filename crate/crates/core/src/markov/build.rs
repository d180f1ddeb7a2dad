use super::model::{Entry, MarkovModel, Rewards};
use super::reward::RewardPolys;
use super::MarkovError;
use crate::arith::{format_rational, Rational};
use crate::poly::{Polynomial, Vars};
use crate::simplex::{
    check_simplex_extensible, CheckOptions, ExtensibilityReport, SimplexConstraint, SimplexSpec, SystemM, XVar,
};
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

/// The cost-effectiveness question. Thresholds are rational constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Metric {
    /// `R_inf >= threshold`.
    TotalRewardGE { threshold: Rational },
    /// Reward over periods `0..=horizon` at least `threshold`.
    FiniteRewardGE { threshold: Rational, horizon: u32 },
    /// `R_inf(a) >= R_inf(b)`.
    CompareRewards,
    /// Net monetary benefit `W b - c`; with two models the difference
    /// `NMB(a) - NMB(b)` is bounded instead.
    NmbGE { wtp: Rational, threshold: Rational },
    /// `(C_a - C_b) / (B_a - B_b) <= threshold` given the sign of the
    /// benefit difference.
    IcerLE { threshold: Rational, benefit_positive: Option<bool> },
}

impl Metric {
    fn model_count(&self) -> (usize, usize) {
        match self {
            Metric::TotalRewardGE { .. } | Metric::FiniteRewardGE { .. } => (1, 1),
            Metric::CompareRewards | Metric::IcerLE { .. } => (2, 2),
            Metric::NmbGE { .. } => (1, 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub metric: Metric,
    /// `None` frees every parameter that is not fixed.
    pub free_params: Option<Vec<String>>,
    pub fixed_params: BTreeMap<String, Rational>,
    pub ifr: bool,
    /// Reward-type parameters allowed to take negative values.
    pub unsigned: Vec<String>,
}

impl Query {
    pub fn new(metric: Metric) -> Query {
        Query {
            metric,
            free_params: None,
            fixed_params: BTreeMap::new(),
            ifr: false,
            unsigned: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MarkovSystem {
    pub system: SystemM,
    /// Set by [`build_system`]; [`encode_system`] leaves it empty.
    pub report: Option<ExtensibilityReport>,
    /// Per model: `(numerator, denominator)` of each reward vector's `R_inf`.
    pub rewards: Vec<Vec<(Polynomial, Polynomial)>>,
    /// Human-readable record of modelling choices made while building.
    pub notes: Vec<String>,
}

fn fix_entry(e: &Entry, fixed: &BTreeMap<String, Rational>) -> Entry {
    match e {
        Entry::Sym(s) => fixed.get(s).map_or_else(|| e.clone(), |q| Entry::Num(q.clone())),
        _ => e.clone(),
    }
}

fn fix_model(m: &MarkovModel, fixed: &BTreeMap<String, Rational>) -> MarkovModel {
    let f = |v: &Vec<Entry>| v.iter().map(|e| fix_entry(e, fixed)).collect::<Vec<_>>();
    MarkovModel {
        n: m.n,
        lambda: m.lambda.clone(),
        p: m.p.iter().map(f).collect(),
        rewards: match &m.rewards {
            Rewards::R(r) => Rewards::R(f(r)),
            Rewards::BenefitCost { b, c } => Rewards::BenefitCost { b: f(b), c: f(c) },
        },
        pi: f(&m.pi),
        absorbing: m.absorbing.clone(),
    }
}

struct Registry {
    vars: Vars,
    simplices: Vec<(Vec<String>, SimplexConstraint)>,
    slacks: BTreeSet<String>,
    notes: Vec<String>,
}

impl Registry {
    /// One probability row: symbolic entries outside `slack_cols` form a
    /// simplex; a symbolic entry in a slack column turns its constraint
    /// into an inequality.
    fn register(&mut self, label: &str, row: &[Entry], slack_cols: &[usize]) -> Result<(), MarkovError> {
        let mut syms = Vec::new();
        let mut has_slack = false;
        let mut numeric = Rational::zero();
        for (j, e) in row.iter().enumerate() {
            match e {
                Entry::Num(q) => numeric += q,
                Entry::Sym(s) if slack_cols.contains(&j) => {
                    has_slack = true;
                    self.slacks.insert(s.clone());
                }
                Entry::Sym(s) => syms.push(s.clone()),
                Entry::Expr(s) => return Err(MarkovError::NotProbability(s.clone())),
            }
        }
        if syms.is_empty() {
            return Ok(());
        }
        let kappa = Rational::one() - numeric;
        if !kappa.is_positive() {
            return Err(MarkovError::Shape(format!("{label} leaves no probability mass for its symbolic entries")));
        }
        let c = if has_slack {
            self.notes.push(format!(
                "{label}: absorbing-column entries act as slack, so the symbolic entries sum to at most {}",
                format_rational(&kappa)
            ));
            SimplexConstraint::Leq(kappa)
        } else {
            SimplexConstraint::Eq(kappa)
        };
        if let Some((_, prev)) = self.simplices.iter().find(|(s, _)| *s == syms) {
            if *prev != c {
                return Err(MarkovError::Shape(format!("{label} conflicts with an identical row elsewhere")));
            }
            return Ok(());
        }
        for s in &syms {
            self.vars.intern(s);
        }
        self.simplices.push((syms, c));
        Ok(())
    }
}

fn need_bc(m: &MarkovModel) -> Result<(&Vec<Entry>, &Vec<Entry>), MarkovError> {
    match &m.rewards {
        Rewards::BenefitCost { b, c } => Ok((b, c)),
        Rewards::R(_) => Err(MarkovError::Metric("needs benefit and cost vectors".into())),
    }
}

fn need_r(m: &MarkovModel) -> Result<&Vec<Entry>, MarkovError> {
    match &m.rewards {
        Rewards::R(r) => Ok(r),
        Rewards::BenefitCost { .. } => Err(MarkovError::Metric("needs a single reward vector".into())),
    }
}

/// Encodes the query over one or two models and asserts the result is
/// simplex-extensible.
pub fn build_system(models: &[&MarkovModel], query: &Query, opts: &CheckOptions) -> Result<MarkovSystem, MarkovError> {
    let mut ms = encode_system(models, query)?;
    let report = check_simplex_extensible(&ms.system, opts)?;
    if !report.extensible {
        return Err(MarkovError::NotExtensible(Box::new(report)));
    }
    ms.report = Some(report);
    Ok(ms)
}

/// Encodes the query over one or two models as a structured system
/// without the extensibility check.
pub fn encode_system(models: &[&MarkovModel], query: &Query) -> Result<MarkovSystem, MarkovError> {
    let (lo, hi) = query.metric.model_count();
    if models.len() < lo || models.len() > hi {
        return Err(MarkovError::Metric(format!("expects {lo}..={hi} models, got {}", models.len())));
    }
    for m in models {
        m.validate()?;
    }
    let mut probs = BTreeSet::new();
    let mut rewards = BTreeSet::new();
    for m in models {
        probs.extend(m.probability_symbols());
        rewards.extend(m.reward_symbols());
    }
    if let Some(s) = probs.intersection(&rewards).next() {
        return Err(MarkovError::MixedRole(s.clone()));
    }
    let all: BTreeSet<String> = probs.union(&rewards).cloned().collect();
    for name in query.fixed_params.keys().chain(query.free_params.iter().flatten()).chain(&query.unsigned) {
        if !all.contains(name) {
            return Err(MarkovError::UnknownParam(name.clone()));
        }
    }
    let fixed_models: Vec<MarkovModel> = models.iter().map(|m| fix_model(m, &query.fixed_params)).collect();
    for m in &fixed_models {
        m.validate()?;
    }

    let mut reg = Registry {
        vars: Vars::new(),
        simplices: Vec::new(),
        slacks: BTreeSet::new(),
        notes: Vec::new(),
    };
    for (k, m) in fixed_models.iter().enumerate() {
        let slack_cols: Vec<usize> = if m.is_transient() { m.absorbing.clone() } else { Vec::new() };
        let rows: Vec<usize> = if m.is_transient() { m.transient_states() } else { (0..m.n).collect() };
        for i in rows {
            reg.register(&format!("model {k} row {i}"), &m.p[i], &slack_cols)?;
        }
        reg.register(&format!("model {k} initial distribution"), &m.pi, &slack_cols)?;
    }
    let mut x_names: Vec<String> = Vec::new();
    for m in &fixed_models {
        for v in m.reward_vectors() {
            for e in v {
                for s in e.symbols() {
                    if !query.fixed_params.contains_key(&s) && !x_names.contains(&s) {
                        x_names.push(s);
                    }
                }
            }
        }
    }
    for s in &x_names {
        reg.vars.intern(s);
    }
    if let Some(free) = &query.free_params {
        let missing = all
            .iter()
            .find(|s| !free.contains(s) && !query.fixed_params.contains_key(*s) && !reg.slacks.contains(*s));
        if let Some(s) = missing {
            return Err(MarkovError::Uncovered(s.clone()));
        }
    }
    let free: Vec<String> = match &query.free_params {
        Some(f) => f.clone(),
        None => all.iter().filter(|s| !query.fixed_params.contains_key(*s)).cloned().collect(),
    };
    for s in &free {
        let registered = reg.simplices.iter().any(|(v, _)| v.contains(s)) || x_names.contains(s) || reg.slacks.contains(s);
        if !registered {
            return Err(MarkovError::Unregistered(s.clone()));
        }
    }
    for u in &query.unsigned {
        if !x_names.contains(u) {
            return Err(MarkovError::Metric(format!("'{u}' is not a free reward-type parameter")));
        }
    }

    let mut vars = reg.vars;
    let mut notes = reg.notes;
    let identity = |e: &Entry| e.clone();
    let wtp = match &query.metric {
        Metric::NmbGE { wtp, .. } => Some(wtp.clone()),
        _ => None,
    };
    let mut per_model: Vec<Vec<(Polynomial, Polynomial)>> = Vec::new();
    let mut chains: Vec<RewardPolys> = Vec::new();
    for m in &fixed_models {
        let vecs: Vec<Vec<Polynomial>> = m
            .reward_vectors()
            .iter()
            .map(|v| v.iter().map(|e| e.to_poly_fixed(&mut vars, &query.fixed_params)).collect())
            .collect();
        per_model.push(
            vecs.iter()
                .map(|v| RewardPolys::new(m, v, &mut vars, &identity).infinite())
                .collect(),
        );
        let effective: Vec<Polynomial> = match (&wtp, vecs.len()) {
            (Some(w), 2) => vecs[0].iter().zip(&vecs[1]).map(|(b, c)| &b.scale(w) - c).collect(),
            _ => vecs[0].clone(),
        };
        chains.push(RewardPolys::new(m, &effective, &mut vars, &identity));
    }

    let konst = |q: &Rational| Polynomial::constant(q.clone());
    let fstar = match &query.metric {
        Metric::TotalRewardGE { threshold } => {
            need_r(models[0])?;
            let (n, d) = &per_model[0][0];
            n - &(&konst(threshold) * d)
        }
        Metric::FiniteRewardGE { threshold, horizon } => {
            need_r(models[0])?;
            &chains[0].finite(*horizon) - &konst(threshold)
        }
        Metric::CompareRewards => {
            need_r(models[0])?;
            need_r(models[1])?;
            let (na, da) = &per_model[0][0];
            let (nb, db) = &per_model[1][0];
            &(na * db) - &(nb * da)
        }
        Metric::NmbGE { threshold, .. } => {
            for m in models {
                need_bc(m)?;
            }
            let nd: Vec<(Polynomial, Polynomial)> = chains.iter().map(RewardPolys::infinite).collect();
            if nd.len() == 1 {
                &nd[0].0 - &(&konst(threshold) * &nd[0].1)
            } else {
                let (na, da) = &nd[0];
                let (nb, db) = &nd[1];
                &(&(na * db) - &(nb * da)) - &(&konst(threshold) * &(da * db))
            }
        }
        Metric::IcerLE {
            threshold,
            benefit_positive,
        } => {
            for m in models {
                need_bc(m)?;
            }
            let positive = benefit_positive.ok_or(MarkovError::IcerSign)?;
            let (nba, da) = &per_model[0][0];
            let (nca, _) = &per_model[0][1];
            let (nbb, db) = &per_model[1][0];
            let (ncb, _) = &per_model[1][1];
            let b = &(nba * db) - &(nbb * da);
            let c = &(nca * db) - &(ncb * da);
            let tb = &konst(threshold) * &b;
            notes.push(format!(
                "ICER orientation assumes the benefit difference is {}",
                if positive { "positive" } else { "negative" }
            ));
            if positive {
                &tb - &c
            } else {
                &c - &tb
            }
        }
    };

    let simplices: Vec<SimplexSpec> = reg
        .simplices
        .iter()
        .enumerate()
        .map(|(i, (names, c))| {
            let vs = names.iter().map(|s| vars.lookup(s).expect("interned")).collect();
            SimplexSpec::new(i, vs, c.clone())
        })
        .collect();
    let x_vars: Vec<XVar> = x_names
        .iter()
        .map(|s| XVar {
            var: vars.lookup(s).expect("interned"),
            nonneg: !query.unsigned.contains(s),
        })
        .collect();
    let system = SystemM::new(vars, simplices, x_vars, fstar, query.ifr)?;
    Ok(MarkovSystem {
        system,
        report: None,
        rewards: per_model,
        notes,
    })
}
