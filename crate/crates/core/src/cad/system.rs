use crate::arith::{Rational, Sign};
use crate::poly::{parse_polynomial, PolyError, Polynomial, Var, Vars};
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

/// Comparison of a polynomial against zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl Relation {
    pub fn holds(self, s: Sign) -> bool {
        match self {
            Relation::Lt => s == Sign::Negative,
            Relation::Le => s != Sign::Positive,
            Relation::Eq => s == Sign::Zero,
            Relation::Ne => s != Sign::Zero,
            Relation::Ge => s != Sign::Negative,
            Relation::Gt => s == Sign::Positive,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Relation> {
        Some(match s {
            "<" => Relation::Lt,
            "<=" => Relation::Le,
            "=" | "==" => Relation::Eq,
            "!=" => Relation::Ne,
            ">=" => Relation::Ge,
            ">" => Relation::Gt,
            _ => return None,
        })
    }

    /// Strict relation matching an exact sign.
    pub fn of_sign(s: Sign) -> Relation {
        match s {
            Sign::Negative => Relation::Lt,
            Sign::Zero => Relation::Eq,
            Sign::Positive => Relation::Gt,
        }
    }
}

/// `poly rel 0`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub poly: Polynomial,
    pub rel: Relation,
}

impl Atom {
    pub fn new(poly: Polynomial, rel: Relation) -> Atom {
        Atom { poly, rel }
    }

    pub fn render(&self, vars: &Vars) -> String {
        alloc::format!("{} {} 0", self.poly.render(vars), self.rel.symbol())
    }
}

/// Conjunction of polynomial sign conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySystem {
    pub vars: Vars,
    pub atoms: Vec<Atom>,
}

impl PolySystem {
    pub fn new(vars: Vars) -> PolySystem {
        PolySystem {
            vars,
            atoms: Vec::new(),
        }
    }

    /// Parses `lhs rel rhs` constraints such as `x^2 + y^2 <= 1`.
    pub fn parse(constraints: &[&str]) -> Result<PolySystem, PolyError> {
        let mut vars = Vars::new();
        let mut atoms = Vec::new();
        for c in constraints {
            atoms.push(parse_constraint(c, &mut vars)?);
        }
        Ok(PolySystem { vars, atoms })
    }

    pub fn polys(&self) -> Vec<Polynomial> {
        self.atoms.iter().map(|a| a.poly.clone()).collect()
    }

    pub fn used_vars(&self) -> BTreeSet<Var> {
        self.atoms.iter().flat_map(|a| a.poly.vars()).collect()
    }

    /// Truth at a rational point given by a total assignment.
    pub fn holds_with<F: Fn(Var) -> Rational + Copy>(&self, f: F) -> bool {
        self.atoms
            .iter()
            .all(|a| a.rel.holds(Sign::of(&a.poly.eval_with(f))))
    }
}

/// Parses one `lhs rel rhs` constraint, registering variables in `vars`.
pub fn parse_constraint(text: &str, vars: &mut Vars) -> Result<Atom, PolyError> {
    for sym in ["<=", ">=", "!=", "==", "<", ">", "="] {
        if let Some(pos) = text.find(sym) {
            let lhs = parse_polynomial(&text[..pos], vars)?;
            let rhs = parse_polynomial(&text[pos + sym.len()..], vars).map_err(|e| match e {
                PolyError::Parse { position, message } => PolyError::Parse {
                    position: position + pos + sym.len(),
                    message,
                },
                other => other,
            })?;
            return Ok(Atom::new(&lhs - &rhs, Relation::from_symbol(sym).unwrap()));
        }
    }
    Err(PolyError::Parse {
        position: text.len(),
        message: "missing relation".into(),
    })
}
