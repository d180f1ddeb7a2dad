use super::{SimplexConstraint, SimplexError, SimplexSpec, SystemM};
use crate::arith::int;
use crate::poly::{Polynomial, Var, Vars};
use alloc::format;
use alloc::vec::Vec;

/// `z_var` (0-based) or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

pub type Clause = Vec<Literal>;

/// Encodes a 3-CNF over `n_vars` booleans as a simplex system that is
/// feasible exactly when the formula is satisfiable.
///
/// Boolean `z_i` becomes the 2-simplex `(a<i>_1, a<i>_2)` with `a<i>_1 = 1`
/// meaning true. `f1 = sum a(1 - a)` vanishes only at vertices and `f2`
/// sums, per clause, the product of its literals' falsity indicators.
/// The system is `-(f1 + f2) >= 0`.
pub fn encode_3sat(n_vars: usize, clauses: &[Clause]) -> Result<SystemM, SimplexError> {
    for (i, c) in clauses.iter().enumerate() {
        if c.len() != 3 {
            return Err(SimplexError::ClauseArity(i, c.len()));
        }
        if let Some(l) = c.iter().find(|l| l.var >= n_vars) {
            return Err(SimplexError::LiteralRange(l.var, n_vars));
        }
    }
    let mut vars = Vars::new();
    let pairs: Vec<[Var; 2]> = (1..=n_vars)
        .map(|i| [vars.intern(&format!("a{i}_1")), vars.intern(&format!("a{i}_2"))])
        .collect();
    let one = Polynomial::one();
    let mut f1 = Polynomial::zero();
    for pair in &pairs {
        for v in pair {
            let a = Polynomial::var(*v);
            f1 = &f1 + &(&a * &(&one - &a));
        }
    }
    let mut f2 = Polynomial::zero();
    for c in clauses {
        let prod = c.iter().fold(Polynomial::one(), |acc, l| {
            let falsity = pairs[l.var][if l.positive { 1 } else { 0 }];
            &acc * &Polynomial::var(falsity)
        });
        f2 = &f2 + &prod;
    }
    let simplices = pairs
        .iter()
        .enumerate()
        .map(|(i, p)| SimplexSpec::new(i, p.to_vec(), SimplexConstraint::Eq(int(1))))
        .collect();
    SystemM::new(vars, simplices, Vec::new(), -(&f1 + &f2), false)
}
