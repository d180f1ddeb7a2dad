use super::SimplexError;
use crate::arith::{Rational, Sign};
use crate::cad::{Atom, PolySystem, Relation};
use crate::poly::{Monomial, Polynomial, Var, VarKind, Vars};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use num_traits::{One, Signed};

/// `sum = kappa` or `sum <= kappa` over a simplex's variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimplexConstraint {
    Eq(Rational),
    Leq(Rational),
}

impl SimplexConstraint {
    pub fn kappa(&self) -> &Rational {
        match self {
            SimplexConstraint::Eq(k) | SimplexConstraint::Leq(k) => k,
        }
    }

    pub fn is_eq(&self) -> bool {
        matches!(self, SimplexConstraint::Eq(_))
    }
}

/// Nonnegative variables with a bounded sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexSpec {
    pub index: usize,
    pub vars: Vec<Var>,
    pub constraint: SimplexConstraint,
}

impl SimplexSpec {
    pub fn new(index: usize, vars: Vec<Var>, constraint: SimplexConstraint) -> SimplexSpec {
        SimplexSpec { index, vars, constraint }
    }

    pub fn size(&self) -> usize {
        self.vars.len()
    }

    pub fn validate(&self, names: &Vars) -> Result<(), SimplexError> {
        if self.vars.is_empty() {
            return Err(SimplexError::EmptySimplex(self.index));
        }
        let k = self.constraint.kappa();
        if !k.is_positive() || k > &Rational::one() {
            return Err(SimplexError::KappaOutOfRange(k.to_string()));
        }
        let mut seen = BTreeSet::new();
        for v in &self.vars {
            if !seen.insert(*v) {
                return Err(SimplexError::SharedVariable(names.name(*v).into()));
            }
        }
        Ok(())
    }

    pub fn sum(&self) -> Polynomial {
        self.vars
            .iter()
            .fold(Polynomial::zero(), |acc, v| &acc + &Polynomial::var(*v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XVar {
    pub var: Var,
    /// `x >= 0` when true; unconstrained otherwise.
    pub nonneg: bool,
}

/// `f(x) * g(alpha)` with `f` monic in `x` and free of a constant term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XTerm {
    pub var: Var,
    pub f: Polynomial,
    pub g: Polynomial,
}

impl XTerm {
    pub fn is_linear(&self) -> bool {
        self.f == Polynomial::var(self.var)
    }
}

/// `f* = g0 + sum_i f_i(x_i) g_i(alpha)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub g0: Polynomial,
    pub terms: Vec<XTerm>,
}

/// The structured system `f* >= 0` over products of simplices (optionally
/// with the IFR ordering between rows) and x-type variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemM {
    pub vars: Vars,
    pub simplices: Vec<SimplexSpec>,
    pub ifr: bool,
    pub x_vars: Vec<XVar>,
    pub fstar: Polynomial,
    pub decomposition: Decomposition,
}

impl SystemM {
    /// Validates the simplices, tags variable kinds and splits `fstar`
    /// into `g0 + sum f_i g_i`.
    pub fn new(
        mut vars: Vars,
        simplices: Vec<SimplexSpec>,
        x_vars: Vec<XVar>,
        fstar: Polynomial,
        ifr: bool,
    ) -> Result<SystemM, SimplexError> {
        let mut owner: BTreeMap<Var, usize> = BTreeMap::new();
        for (si, s) in simplices.iter().enumerate() {
            s.validate(&vars)?;
            for (pos, v) in s.vars.iter().enumerate() {
                if owner.insert(*v, si).is_some() {
                    return Err(SimplexError::SharedVariable(vars.name(*v).into()));
                }
                vars.set_kind(*v, VarKind::Alpha { simplex: si, position: pos });
            }
        }
        for (i, x) in x_vars.iter().enumerate() {
            if owner.contains_key(&x.var) {
                return Err(SimplexError::SharedVariable(vars.name(x.var).into()));
            }
            vars.set_kind(x.var, VarKind::X { index: i });
        }
        if ifr {
            let phi = simplices.len();
            let ok = phi >= 1
                && simplices
                    .iter()
                    .all(|s| s.size() == phi && s.constraint == SimplexConstraint::Eq(Rational::one()));
            if !ok {
                return Err(SimplexError::IfrShape(format!(
                    "{phi} simplices of size {phi}, each summing to exactly 1"
                )));
            }
        }
        let decomposition = decompose(&fstar, &x_vars, &owner, &vars)?;
        Ok(SystemM {
            vars,
            simplices,
            ifr,
            x_vars,
            fstar,
            decomposition,
        })
    }

    pub fn alpha_vars(&self) -> Vec<Var> {
        self.simplices.iter().flat_map(|s| s.vars.iter().copied()).collect()
    }

    /// Simplex coordinates in (simplex, position) order, then x-type ones.
    pub fn default_order(&self) -> Vec<Var> {
        let mut o = self.alpha_vars();
        o.extend(self.x_vars.iter().map(|x| x.var));
        o
    }

    /// Row-dominance polynomials `sum_{l<=j} a[i-1][l] - sum_{l<=j} a[i][l]`
    /// (each must be nonnegative) for IFR systems.
    pub fn ifr_dominance(&self) -> Vec<Polynomial> {
        let mut out = Vec::new();
        if !self.ifr {
            return out;
        }
        let phi = self.simplices.len();
        for i in 1..phi {
            let mut acc = Polynomial::zero();
            for j in 0..phi - 1 {
                acc = &(&acc + &Polynomial::var(self.simplices[i - 1].vars[j])) - &Polynomial::var(self.simplices[i].vars[j]);
                out.push(acc.clone());
            }
        }
        out
    }

    /// The same feasible set as a general conjunctive system.
    pub fn to_poly_system(&self) -> PolySystem {
        let mut atoms = alloc::vec![Atom::new(self.fstar.clone(), Relation::Ge)];
        for s in &self.simplices {
            let lhs = &s.sum() - &Polynomial::constant(s.constraint.kappa().clone());
            atoms.push(Atom::new(lhs, if s.constraint.is_eq() { Relation::Eq } else { Relation::Le }));
            for v in &s.vars {
                atoms.push(Atom::new(Polynomial::var(*v), Relation::Ge));
            }
        }
        for d in self.ifr_dominance() {
            atoms.push(Atom::new(d, Relation::Ge));
        }
        for x in &self.x_vars {
            if x.nonneg {
                atoms.push(Atom::new(Polynomial::var(x.var), Relation::Ge));
            }
        }
        PolySystem {
            vars: self.vars.clone(),
            atoms,
        }
    }

    /// Whether a rational point satisfies every constraint and `f* >= 0`.
    pub fn holds_at(&self, point: &BTreeMap<Var, Rational>) -> bool {
        let sys = self.to_poly_system();
        sys.atoms.iter().all(|a| match a.poly.eval(point) {
            Some(v) => a.rel.holds(Sign::of(&v)),
            None => false,
        })
    }

    pub fn simplex_of(&self, v: Var) -> Option<usize> {
        self.simplices.iter().position(|s| s.vars.contains(&v))
    }
}

fn decompose(
    fstar: &Polynomial,
    x_vars: &[XVar],
    owner: &BTreeMap<Var, usize>,
    names: &Vars,
) -> Result<Decomposition, SimplexError> {
    let xs: Vec<Var> = x_vars.iter().map(|x| x.var).collect();
    let mut g0 = Polynomial::zero();
    // per x variable: exponent -> alpha coefficient
    let mut parts: Vec<BTreeMap<u32, Polynomial>> = alloc::vec![BTreeMap::new(); xs.len()];
    for (m, c) in fstar.terms() {
        let present: Vec<usize> = (0..xs.len()).filter(|&i| m.exp(xs[i]) > 0).collect();
        for (v, _) in m.vars() {
            if !owner.contains_key(&v) && !xs.contains(&v) {
                return Err(SimplexError::UnsupportedShape(format!(
                    "variable '{}' is neither a simplex coordinate nor an x-type variable",
                    names.name(v)
                )));
            }
        }
        match present.as_slice() {
            [] => g0 = &g0 + &Polynomial::from_term(m.clone(), c.clone()),
            [i] => {
                let e = m.exp(xs[*i]);
                let rest = Polynomial::from_term(m.with_exp(xs[*i], 0), c.clone());
                let slot = parts[*i].entry(e).or_insert_with(Polynomial::zero);
                *slot = &*slot + &rest;
            }
            many => {
                return Err(SimplexError::UnsupportedShape(format!(
                    "monomial couples x-type variables {}",
                    many.iter().map(|&i| names.name(xs[i])).collect::<Vec<_>>().join(", ")
                )))
            }
        }
    }
    let mut terms = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        let by_exp = &parts[i];
        let Some((&emax, g)) = by_exp.iter().next_back() else {
            terms.push(XTerm {
                var: x,
                f: Polynomial::var(x),
                g: Polynomial::zero(),
            });
            continue;
        };
        let g = g.clone();
        let (_, glc) = g.leading().expect("nonzero part");
        let glc = glc.clone();
        let mut f = Polynomial::zero();
        for (&e, h) in by_exp {
            let (_, hlc) = h.leading().expect("nonzero part");
            let ratio = hlc / &glc;
            if h != &g.scale(&ratio) {
                return Err(SimplexError::UnsupportedShape(format!(
                    "terms in '{}' do not factor as f({0})*g(alpha)",
                    names.name(x)
                )));
            }
            f = &f + &Polynomial::from_term(Monomial::var(x, e), ratio);
        }
        debug_assert!(emax >= 1);
        terms.push(XTerm { var: x, f, g });
    }
    Ok(Decomposition { g0, terms })
}
