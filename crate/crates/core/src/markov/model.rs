use super::MarkovError;
use crate::arith::{format_rational, parse_rational, Rational};
use crate::poly::{parse_polynomial, Polynomial, Vars};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

/// A model entry: a number, a parameter name, or (rewards only) an
/// expression over parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    Num(Rational),
    Sym(String),
    Expr(String),
}

fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Entry {
    /// Rational or bare symbol; anything else is a rational parse error.
    pub fn parse_probability(text: &str) -> Result<Entry, MarkovError> {
        let t = text.trim();
        if is_identifier(t) {
            return Ok(Entry::Sym(t.into()));
        }
        Ok(Entry::Num(parse_rational(t)?))
    }

    /// Rational, symbol or polynomial expression.
    pub fn parse_reward(text: &str) -> Result<Entry, MarkovError> {
        let t = text.trim();
        if is_identifier(t) {
            return Ok(Entry::Sym(t.into()));
        }
        if let Ok(q) = parse_rational(t) {
            return Ok(Entry::Num(q));
        }
        if t.starts_with(|c: char| c.is_ascii_digit() || c == '.') && !t.contains(|c: char| "+-*/^() ".contains(c)) {
            return Ok(Entry::Num(parse_rational(t)?));
        }
        parse_polynomial(t, &mut Vars::new())?;
        Ok(Entry::Expr(t.into()))
    }

    pub fn render(&self) -> String {
        match self {
            Entry::Num(q) => format_rational(q),
            Entry::Sym(s) | Entry::Expr(s) => s.clone(),
        }
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self {
            Entry::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn symbols(&self) -> Vec<String> {
        match self {
            Entry::Num(_) => Vec::new(),
            Entry::Sym(s) => alloc::vec![s.clone()],
            Entry::Expr(e) => {
                let mut vs = Vars::new();
                parse_polynomial(e, &mut vs).expect("validated at parse");
                vs.infos().iter().map(|i| i.name.clone()).collect()
            }
        }
    }

    pub fn to_poly(&self, vars: &mut Vars) -> Polynomial {
        match self {
            Entry::Num(q) => Polynomial::constant(q.clone()),
            Entry::Sym(s) => Polynomial::var(vars.intern(s)),
            Entry::Expr(e) => parse_polynomial(e, vars).expect("validated at parse"),
        }
    }

    /// Like [`Entry::to_poly`] with the named values substituted and
    /// never interned.
    pub fn to_poly_fixed(&self, vars: &mut Vars, fixed: &BTreeMap<String, Rational>) -> Polynomial {
        let mut scratch = Vars::new();
        let local = self.to_poly(&mut scratch);
        let mut out = Polynomial::zero();
        for (m, c) in local.terms() {
            let mut term = Polynomial::constant(c.clone());
            for (v, e) in m.vars() {
                let name = scratch.name(v);
                let factor = match fixed.get(name) {
                    Some(q) => Polynomial::constant(q.clone()),
                    None => Polynomial::var(vars.intern(name)),
                };
                term = &term * &factor.pow(e);
            }
            out = &out + &term;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rewards {
    R(Vec<Entry>),
    /// Per-period benefits and costs.
    BenefitCost { b: Vec<Entry>, c: Vec<Entry> },
}

/// A Markov reward process with possibly symbolic entries. Without a
/// discount factor the model is read as an undiscounted absorbing chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovModel {
    pub n: usize,
    pub lambda: Option<Rational>,
    pub p: Vec<Vec<Entry>>,
    pub rewards: Rewards,
    pub pi: Vec<Entry>,
    pub absorbing: Vec<usize>,
}

impl MarkovModel {
    pub fn is_transient(&self) -> bool {
        self.lambda.is_none()
    }

    /// Non-absorbing states in order.
    pub fn transient_states(&self) -> Vec<usize> {
        (0..self.n).filter(|i| !self.absorbing.contains(i)).collect()
    }

    pub fn reward_vectors(&self) -> Vec<&Vec<Entry>> {
        match &self.rewards {
            Rewards::R(r) => alloc::vec![r],
            Rewards::BenefitCost { b, c } => alloc::vec![b, c],
        }
    }

    pub fn probability_symbols(&self) -> BTreeSet<String> {
        self.p.iter().flatten().chain(&self.pi).flat_map(Entry::symbols).collect()
    }

    pub fn reward_symbols(&self) -> BTreeSet<String> {
        self.reward_vectors().into_iter().flatten().flat_map(Entry::symbols).collect()
    }

    /// Shape, discount, row sums and absorbing-state checks.
    pub fn validate(&self) -> Result<(), MarkovError> {
        let n = self.n;
        if n == 0 {
            return Err(MarkovError::Shape("no states".into()));
        }
        if self.p.len() != n || self.p.iter().any(|r| r.len() != n) {
            return Err(MarkovError::Shape(format!("P must be {n}x{n}")));
        }
        if self.pi.len() != n {
            return Err(MarkovError::Shape(format!("pi must have {n} entries")));
        }
        for v in self.reward_vectors() {
            if v.len() != n {
                return Err(MarkovError::Shape(format!("reward vectors must have {n} entries")));
            }
        }
        for row in self.p.iter().chain(core::iter::once(&self.pi)) {
            for e in row {
                if let Entry::Expr(s) = e {
                    return Err(MarkovError::NotProbability(s.clone()));
                }
                if let Entry::Num(q) = e {
                    if q.is_negative() || q > &Rational::one() {
                        return Err(MarkovError::NotProbability(format_rational(q)));
                    }
                }
            }
        }
        let probs = self.probability_symbols();
        if let Some(s) = self.reward_symbols().intersection(&probs).next() {
            return Err(MarkovError::MixedRole(s.clone()));
        }
        if let Some(l) = &self.lambda {
            if !l.is_positive() || l >= &Rational::one() {
                return Err(MarkovError::Lambda(l.to_string()));
            }
        } else if self.absorbing.is_empty() {
            return Err(MarkovError::Shape(
                "an undiscounted model needs at least one absorbing state".into(),
            ));
        }
        for &a in &self.absorbing {
            if a >= n {
                return Err(MarkovError::Absorbing(a, "index out of range".into()));
            }
            for (j, e) in self.p[a].iter().enumerate() {
                let want = if j == a { Rational::one() } else { Rational::zero() };
                if e.as_num() != Some(&want) {
                    return Err(MarkovError::Absorbing(a, "row must be the unit vector".into()));
                }
            }
            for v in self.reward_vectors() {
                if v[a].as_num().map(|q| q.is_zero()) != Some(true) {
                    return Err(MarkovError::Absorbing(a, "reward must be 0".into()));
                }
            }
        }
        for (i, row) in self.p.iter().enumerate() {
            let numeric: Rational = row.iter().filter_map(Entry::as_num).sum();
            let symbolic = row.iter().any(|e| e.as_num().is_none());
            if (!symbolic && numeric != Rational::one()) || numeric > Rational::one() {
                return Err(MarkovError::RowSum {
                    row: i,
                    sum: format_rational(&numeric),
                });
            }
        }
        let pi_sum: Rational = self.pi.iter().filter_map(Entry::as_num).sum();
        let pi_symbolic = self.pi.iter().any(|e| e.as_num().is_none());
        if (!pi_symbolic && pi_sum != Rational::one()) || pi_sum > Rational::one() {
            return Err(MarkovError::RowSum {
                row: n,
                sum: format_rational(&pi_sum),
            });
        }
        if self.is_transient() {
            for (k, &i) in self.transient_states().iter().enumerate() {
                let all_zero = self
                    .transient_states()
                    .iter()
                    .all(|&j| self.p[i][j].as_num().is_some_and(|q| q.is_zero()));
                if all_zero {
                    return Err(MarkovError::ZeroQRow(k));
                }
            }
        }
        Ok(())
    }
}
