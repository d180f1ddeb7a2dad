use super::point::sign_at_point;
use super::{Atom, CadTree, CellPath, DecisionCad, Relation};
use crate::arith::{Real, Sign};
use crate::poly::{Polynomial, Var, Vars};
use alloc::string::String;
use alloc::vec::Vec;

/// Sign requirement on one factor.
pub type SignCondition = Atom;

/// Conjunction of sign conditions describing one cell.
pub type Conjunct = Vec<SignCondition>;

/// Disjunction of conjuncts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SignedFormula {
    pub conjuncts: Vec<Conjunct>,
}

impl SignedFormula {
    pub fn holds_at(&self, point: &[(Var, Real)]) -> bool {
        self.conjuncts
            .iter()
            .any(|c| c.iter().all(|a| a.rel.holds(sign_at_point(&a.poly, point))))
    }

    pub fn is_false(&self) -> bool {
        self.conjuncts.is_empty()
    }

    /// One conjunct per line, atoms joined by ` and `.
    pub fn render(&self, vars: &Vars) -> String {
        if self.conjuncts.is_empty() {
            return "false".into();
        }
        let lines: Vec<String> = self
            .conjuncts
            .iter()
            .map(|c| {
                if c.is_empty() {
                    "true".into()
                } else {
                    c.iter().map(|a| a.render(vars)).collect::<Vec<_>>().join(" and ")
                }
            })
            .collect();
        lines.join("\nor ")
    }
}

fn sign_vector(factors: &[Polynomial], sample: &[(Var, Real)]) -> Vec<Sign> {
    factors.iter().map(|f| sign_at_point(f, sample)).collect()
}

/// Disjunction over true leaves of the sign conditions of every projection
/// factor at the leaf sample. Duplicate conjuncts are merged.
pub fn solution_formula(cad: &DecisionCad) -> SignedFormula {
    let factors = cad.all_factors();
    let mut conjuncts: Vec<Conjunct> = Vec::new();
    for leaf in cad.tree.leaves() {
        if !leaf.truth() {
            continue;
        }
        let signs = sign_vector(&factors, &leaf.sample());
        let c: Conjunct = factors
            .iter()
            .zip(signs)
            .map(|(f, s)| Atom::new(f.clone(), Relation::of_sign(s)))
            .collect();
        if !conjuncts.contains(&c) {
            conjuncts.push(c);
        }
    }
    SignedFormula { conjuncts }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DefinabilityResult {
    Definable,
    /// Two leaves with identical sign vectors but different truth values.
    Counterexample {
        signs: Vec<Sign>,
        true_leaf: CellPath,
        false_leaf: CellPath,
        true_sample: Vec<Real>,
        false_sample: Vec<Real>,
    },
}

impl DefinabilityResult {
    pub fn is_definable(&self) -> bool {
        matches!(self, DefinabilityResult::Definable)
    }
}

/// Whether truth over the leaves is a function of the factor sign vector.
pub fn is_projection_definable(tree: &CadTree, factors: &[Polynomial]) -> DefinabilityResult {
    let mut seen: Vec<(Vec<Sign>, bool, CellPath, Vec<Real>)> = Vec::new();
    for leaf in tree.leaves() {
        let sample = leaf.sample();
        let signs = sign_vector(factors, &sample);
        let truth = leaf.truth();
        let coords: Vec<Real> = sample.into_iter().map(|(_, r)| r).collect();
        if let Some((_, t, path, s)) = seen.iter().find(|(sv, _, _, _)| *sv == signs) {
            if *t != truth {
                let (tl, ts, fl, fs) = if truth {
                    (leaf.path.clone(), coords, path.clone(), s.clone())
                } else {
                    (path.clone(), s.clone(), leaf.path.clone(), coords)
                };
                return DefinabilityResult::Counterexample {
                    signs,
                    true_leaf: tl,
                    false_leaf: fl,
                    true_sample: ts,
                    false_sample: fs,
                };
            }
        } else {
            seen.push((signs, truth, leaf.path.clone(), coords));
        }
    }
    DefinabilityResult::Definable
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cad::{decision_cad, CadOptions, PolySystem};
    use alloc::collections::BTreeMap;

    #[test]
    fn disc_formula_matches_tree() {
        let s = PolySystem::parse(&["x^2 + y^2 - 1 <= 0", "y - x >= 0"]).unwrap();
        let order: Vec<Var> = ["x", "y"].iter().map(|n| s.vars.lookup(n).unwrap()).collect();
        let cad = decision_cad(&s, &order, &CadOptions::default()).unwrap();
        let phi = solution_formula(&cad);
        assert!(!phi.is_false());
        assert!(is_projection_definable(&cad.tree, &cad.all_factors()).is_definable());
        for (xn, xd, yn, yd) in [(0, 1, 1, 2), (1, 2, 0, 1), (-1, 2, 1, 2), (1, 1, 1, 1), (-3, 5, -3, 5)] {
            let x = crate::arith::rat(xn, xd);
            let y = crate::arith::rat(yn, yd);
            let mut pt = BTreeMap::new();
            pt.insert(order[0], x.clone());
            pt.insert(order[1], y.clone());
            let direct = s.holds_with(|v| pt[&v].clone());
            let real_pt = [(order[0], Real::Rational(x)), (order[1], Real::Rational(y))];
            assert_eq!(phi.holds_at(&real_pt), direct);
            assert_eq!(cad.tree.satisfied_at(&pt), direct);
        }
    }

    #[test]
    fn truncated_factors_lose_definability() {
        let s = PolySystem::parse(&["x^2 + y^2 - 1 <= 0"]).unwrap();
        let order: Vec<Var> = ["x", "y"].iter().map(|n| s.vars.lookup(n).unwrap()).collect();
        let cad = decision_cad(&s, &order, &CadOptions::default()).unwrap();
        let coarse = cad.levels[0].factors.clone();
        assert!(!is_projection_definable(&cad.tree, &coarse).is_definable());
    }
}
