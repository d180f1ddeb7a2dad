use super::extensible::{check_simplex_extensible, CheckOptions, ExtensibilityReport};
use super::trees::simplex_system_cad;
use super::{SimplexError, SystemM};
use crate::arith::{compare, rational_between, Endpoint, Rational, Real, Sign};
use crate::cad::{roots_over, sign_at_point, Atom, Bound, CadCell, CadError, CadTree, CellKind, Conjunct, LevelRoots, Relation, SignedFormula};
use crate::poly::{Polynomial, Var};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use num_traits::One;

#[derive(Debug, Clone, Default)]
pub struct SpecializedOptions {
    pub check: CheckOptions,
    pub max_cells: Option<usize>,
    pub parallel: bool,
}

#[derive(Debug, Clone)]
pub struct SpecializedCad {
    /// True cells only.
    pub tree: CadTree,
    /// Before false leaves were deleted.
    pub full: CadTree,
    pub formula: SignedFormula,
    pub report: ExtensibilityReport,
    pub pruned_false: usize,
}

struct XLifter<'a> {
    sys: &'a SystemM,
    cells: AtomicUsize,
    max_cells: Option<usize>,
}

#[derive(Clone)]
struct State {
    point: Vec<(Var, Real)>,
    /// Coordinates fixed to constants on the current cell.
    fixed: BTreeMap<Var, Rational>,
    conjunct: Conjunct,
}

fn push_atom(c: &mut Conjunct, poly: Polynomial, rel: Relation) {
    if poly.is_constant() {
        return;
    }
    let a = Atom::new(poly, rel);
    if !c.contains(&a) {
        c.push(a);
    }
}

fn sign_atom(c: &mut Conjunct, poly: &Polynomial, point: &[(Var, Real)]) {
    let s = sign_at_point(poly, point);
    push_atom(c, poly.clone(), Relation::of_sign(s));
}

fn section_value(b: &Bound) -> Option<Polynomial> {
    match b {
        Bound::Value(Real::Rational(q)) => Some(Polynomial::constant(q.clone())),
        Bound::Expr { num, den } => den.constant_value().map(|d| num.scale(&(Rational::one() / d))),
        _ => None,
    }
}

impl XLifter<'_> {
    fn bump(&self, n: usize) -> Result<(), SimplexError> {
        let total = self.cells.fetch_add(n, AtomicOrdering::Relaxed) + n;
        match self.max_cells {
            Some(m) if total > m => Err(CadError::CellLimit(m).into()),
            _ => Ok(()),
        }
    }

    /// Lifts x-levels `i..` over a base cell, returning the cells and the
    /// true-leaf conjuncts.
    fn lift(&self, i: usize, state: &State, out: &mut Vec<Conjunct>) -> Result<Vec<CadCell>, SimplexError> {
        let dec = &self.sys.decomposition;
        let Some(term) = dec.terms.get(i) else {
            return Ok(Vec::new());
        };
        let x = term.var;
        let nonneg = self.sys.x_vars[i].nonneg;
        let p: Polynomial = dec
            .terms
            .iter()
            .take(i)
            .fold(dec.g0.clone(), |acc, t| &acc + &(&t.f * &t.g))
            .substitute_rationals(&state.fixed);
        let g = term.g.substitute_rationals(&state.fixed);
        let h = &p + &(&term.f * &g);
        let zero = Real::zero();
        let roots: Vec<Real> = match roots_over(&h, &state.point, x)? {
            LevelRoots::Nullified => Vec::new(),
            LevelRoots::Roots(rs) => rs
                .into_iter()
                .filter(|r| !nonneg || compare(r, &zero) == Ordering::Greater)
                .collect(),
        };
        if roots.len() > 1 {
            return Err(SimplexError::Lifting(format!(
                "{} roots in {} over one cell",
                roots.len(),
                self.sys.vars.name(x)
            )));
        }
        let bound = roots.first().map(|r| {
            if h.degree_in(x) == 1 {
                Bound::ratio(-h.coeff_in(x, 0), h.coeff_in(x, 1))
            } else if nonneg {
                Bound::PosRoot { poly: h.clone() }
            } else {
                let _ = r;
                Bound::Root { poly: h.clone(), index: 1 }
            }
        });
        let zb = Bound::zero();
        let mut pieces: Vec<(CellKind, Real)> = Vec::new();
        let between = |a: Endpoint, b: Endpoint| Real::Rational(rational_between(&a, &b).expect("nonempty interval"));
        match (&bound, roots.first()) {
            (Some(b), Some(r)) => {
                if nonneg {
                    pieces.push((CellKind::Section(zb.clone()), zero.clone()));
                    pieces.push((
                        CellKind::Sector(zb.clone(), b.clone()),
                        between(Endpoint::Finite(zero.clone()), Endpoint::Finite(r.clone())),
                    ));
                } else {
                    pieces.push((
                        CellKind::Sector(Bound::NegInf, b.clone()),
                        between(Endpoint::NegInf, Endpoint::Finite(r.clone())),
                    ));
                }
                pieces.push((CellKind::Section(b.clone()), r.clone()));
                pieces.push((
                    CellKind::Sector(b.clone(), Bound::PosInf),
                    between(Endpoint::Finite(r.clone()), Endpoint::PosInf),
                ));
            }
            _ => {
                if nonneg {
                    pieces.push((CellKind::Section(zb.clone()), zero.clone()));
                    pieces.push((CellKind::Sector(zb, Bound::PosInf), Real::Rational(Rational::one())));
                } else {
                    pieces.push((CellKind::Sector(Bound::NegInf, Bound::PosInf), zero.clone()));
                }
            }
        }
        self.bump(pieces.len())?;
        let mut cells = Vec::with_capacity(pieces.len());
        for (kind, sample) in pieces {
            let mut st = state.clone();
            st.point.push((x, sample.clone()));
            if let CellKind::Section(b) = &kind {
                if let Some(q) = section_value(b).and_then(|p| p.constant_value()) {
                    st.fixed.insert(x, q);
                }
            }
            let xp = Polynomial::var(x);
            if nonneg {
                let rel = if matches!(kind, CellKind::Section(Bound::Value(_))) && sample == zero {
                    Relation::Eq
                } else {
                    Relation::Gt
                };
                push_atom(&mut st.conjunct, xp, rel);
            }
            sign_atom(&mut st.conjunct, &p, &st.point);
            sign_atom(&mut st.conjunct, &g, &st.point);
            sign_atom(&mut st.conjunct, &h, &st.point);
            let children = self.lift(i + 1, &st, out)?;
            let truth = if children.is_empty() {
                let t = sign_at_point(&self.sys.fstar, &st.point) != Sign::Negative;
                if t && !out.contains(&st.conjunct) {
                    out.push(st.conjunct.clone());
                }
                Some(t)
            } else {
                None
            };
            cells.push(CadCell {
                var: x,
                kind,
                sample,
                truth,
                children,
            });
        }
        Ok(cells)
    }
}

/// Conditions describing the simplex part of a cell.
fn alpha_conjunct(cells: &[&CadCell]) -> Conjunct {
    let mut c = Conjunct::new();
    for cell in cells {
        let v = Polynomial::var(cell.var);
        match &cell.kind {
            CellKind::Section(b) => {
                if let Some(p) = section_value(b) {
                    push_atom(&mut c, &v - &p, Relation::Eq);
                }
            }
            CellKind::Sector(lo, hi) => {
                if let Some(p) = section_value(lo) {
                    push_atom(&mut c, &v - &p, Relation::Gt);
                }
                if let Some(p) = section_value(hi) {
                    push_atom(&mut c, &v - &p, Relation::Lt);
                }
            }
        }
    }
    c
}

fn leaf_mut<'a>(cells: &'a mut [CadCell], path: &[usize]) -> &'a mut CadCell {
    let mut c = &mut cells[path[0]];
    for &i in &path[1..] {
        c = &mut c.children[i];
    }
    c
}

/// Lifts the simplex CAD of an extensible system over its x-type
/// variables, one linear (or monotone) root per level, then deletes false
/// leaves.
pub fn specialized_cad(sys: &SystemM, opts: &SpecializedOptions) -> Result<SpecializedCad, SimplexError> {
    let report = check_simplex_extensible(sys, &opts.check)?;
    if !report.extensible {
        return Err(SimplexError::NotExtensible(alloc::boxed::Box::new(report)));
    }
    let mut base = simplex_system_cad(sys, opts.parallel)?;
    let lifter = XLifter {
        sys,
        cells: AtomicUsize::new(base.node_count()),
        max_cells: opts.max_cells,
    };
    if let Some(m) = opts.max_cells {
        if base.node_count() > m {
            return Err(CadError::CellLimit(m).into());
        }
    }
    let mut jobs: Vec<(Vec<usize>, State)> = base
        .leaves()
        .into_iter()
        .map(|l| {
            let point: Vec<(Var, Real)> = l.sample();
            let fixed = l
                .cells
                .iter()
                .filter_map(|c| match &c.kind {
                    CellKind::Section(b) => section_value(b).and_then(|p| p.constant_value()).map(|q| (c.var, q)),
                    CellKind::Sector(..) => None,
                })
                .collect();
            let conjunct = alpha_conjunct(&l.cells);
            (l.path.clone(), State { point, fixed, conjunct })
        })
        .collect();
    if base.cells.is_empty() {
        // no simplex coordinates: lift from the empty base
        jobs.push((
            Vec::new(),
            State {
                point: Vec::new(),
                fixed: BTreeMap::new(),
                conjunct: Vec::new(),
            },
        ));
    }
    let results = crate::par::map(jobs, opts.parallel, |(path, st)| {
        let mut conj = Vec::new();
        lifter.lift(0, &st, &mut conj).map(|cells| (path, cells, conj, st))
    });
    let mut formula = SignedFormula::default();
    for r in results {
        let (path, cells, conj, st) = r?;
        if path.is_empty() {
            base.cells = cells;
            formula.conjuncts.extend(conj);
            continue;
        }
        let leaf = leaf_mut(&mut base.cells, &path);
        if cells.is_empty() {
            let t = sign_at_point(&sys.fstar, &st.point) != Sign::Negative;
            leaf.truth = Some(t);
            if t && !formula.conjuncts.contains(&st.conjunct) {
                formula.conjuncts.push(st.conjunct);
            }
        } else {
            leaf.truth = None;
            leaf.children = cells;
            for c in conj {
                if !formula.conjuncts.contains(&c) {
                    formula.conjuncts.push(c);
                }
            }
        }
    }
    base.order.extend(sys.x_vars.iter().map(|x| x.var));
    let full = base.clone();
    let pruned_false = base.prune_false();
    Ok(SpecializedCad {
        tree: base,
        full,
        formula,
        report,
        pruned_false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::cad::{render_tree, RenderOptions};
    use crate::poly::{parse_polynomial, Vars};
    use crate::simplex::{cell_count_bound, SimplexConstraint, SimplexSpec, XVar};

    fn system(f: &str, alphas: &[&str], xs: &[&str]) -> SystemM {
        let mut vs = Vars::new();
        let a: Vec<Var> = alphas.iter().map(|n| vs.intern(n)).collect();
        let x: Vec<XVar> = xs.iter().map(|n| XVar { var: vs.intern(n), nonneg: true }).collect();
        let f = parse_polynomial(f, &mut vs).unwrap();
        SystemM::new(vs, alloc::vec![SimplexSpec::new(0, a, SimplexConstraint::Eq(int(1)))], x, f, false).unwrap()
    }

    #[test]
    fn trivial_simplex_threshold() {
        let m = system("x1 - 1", &["a"], &["x1"]);
        let s = specialized_cad(&m, &SpecializedOptions::default()).unwrap();
        let text = render_tree(&s.tree, RenderOptions::default());
        assert_eq!(text, "a = 1\n  x1 >= 1\n");
        let x1 = m.vars.lookup("x1").unwrap();
        let a = m.vars.lookup("a").unwrap();
        for (n, d, want) in [(0, 1, false), (1, 2, false), (1, 1, true), (7, 3, true)] {
            let mut pt = BTreeMap::new();
            pt.insert(a, rat(1, 1));
            pt.insert(x1, rat(n, d));
            assert_eq!(s.tree.satisfied_at(&pt), want);
        }
    }

    const LINEAR_FORM_INTERIOR: &str = "\
0 < a1 < 1
  a2 = 0
    a3 = 1 - a1
      0 <= x1 < 1/a1
        x2 >= 0
          x3 >= (1 - a1*x1)/a3
      x1 >= 1/a1
        x2 >= 0
          x3 >= 0
  0 < a2 < 1 - a1
    a3 = 1 - a1 - a2
      0 <= x1 < 1/a1
        0 <= x2 < (1 - a1*x1)/a2
          x3 >= (1 - a1*x1 - a2*x2)/a3
        x2 >= (1 - a1*x1)/a2
          x3 >= 0
      x1 >= 1/a1
        x2 >= 0
          x3 >= 0
  a2 = 1 - a1
    a3 = 0
      0 <= x1 < 1/a1
        x2 >= (1 - a1*x1)/a2
          x3 >= 0
      x1 >= 1/a1
        x2 >= 0
          x3 >= 0
";

    #[test]
    fn linear_form_interior_branch() {
        let m = system("a1*x1 + a2*x2 + a3*x3 - 1", &["a1", "a2", "a3"], &["x1", "x2", "x3"]);
        let s = specialized_cad(&m, &SpecializedOptions::default()).unwrap();
        let bound = cell_count_bound(&m);
        assert_eq!(bound, 1728u32.into());
        assert!(num_bigint::BigUint::from(s.full.leaf_count()) <= bound);
        let text = render_tree(&s.tree, RenderOptions::default());
        let start = text.find("0 < a1 < 1\n").unwrap();
        let end = text.find("a1 = 1\n").unwrap();
        assert_eq!(&text[start..end], LINEAR_FORM_INTERIOR);
    }

    #[test]
    fn formula_agrees_with_tree() {
        let m = system("a1*x1 - a2*x2 + 1/3*a1 - 1/3", &["a1", "a2"], &["x1", "x2"]);
        let s = specialized_cad(&m, &SpecializedOptions::default()).unwrap();
        let vs: Vec<Var> = ["a1", "a2", "x1", "x2"].iter().map(|n| m.vars.lookup(n).unwrap()).collect();
        for a in 0..=4 {
            for x1 in 0..4 {
                for x2 in 0..4 {
                    let al = rat(a, 4);
                    let pt: BTreeMap<Var, Rational> = [
                        (vs[0], al.clone()),
                        (vs[1], rat(1, 1) - al),
                        (vs[2], rat(x1, 2)),
                        (vs[3], rat(x2, 3)),
                    ]
                    .into_iter()
                    .collect();
                    let direct = m.holds_at(&pt);
                    assert_eq!(s.tree.satisfied_at(&pt), direct);
                    let real: Vec<(Var, Real)> = pt.iter().map(|(v, q)| (*v, Real::Rational(q.clone()))).collect();
                    assert_eq!(s.formula.holds_at(&real), direct);
                }
            }
        }
    }
}
