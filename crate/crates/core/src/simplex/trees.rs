use super::{SimplexConstraint, SimplexError, SimplexSpec, SystemM};
use crate::arith::{int, Rational, Real};
use crate::cad::{Bound, CadCell, CadTree, CellKind};
use crate::poly::{Polynomial, Var, VarKind, Vars};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use num_traits::Zero;

/// One coordinate ranging over `[0, upper]`, or pinned to `upper`.
#[derive(Debug, Clone)]
pub(crate) struct Level {
    pub var: Var,
    pub upper: Polynomial,
    pub forced: bool,
}

pub(crate) fn simplex_levels(spec: &SimplexSpec) -> Vec<Level> {
    let kappa = Polynomial::constant(spec.constraint.kappa().clone());
    let mut prior = Polynomial::zero();
    let mut out = Vec::new();
    for (j, v) in spec.vars.iter().enumerate() {
        out.push(Level {
            var: *v,
            upper: &kappa - &prior,
            forced: spec.constraint.is_eq() && j + 1 == spec.vars.len(),
        });
        prior = &prior + &Polynomial::var(*v);
    }
    out
}

/// Rows after the first are bounded by the partial sums of the row above.
pub(crate) fn ifr_levels(rows: &[SimplexSpec]) -> Vec<Level> {
    let mut out = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if i == 0 {
            out.extend(simplex_levels(row));
            continue;
        }
        let above = &rows[i - 1].vars;
        let mut own = Polynomial::zero();
        let mut prev = Polynomial::zero();
        let n = row.vars.len();
        for (j, v) in row.vars.iter().enumerate() {
            prev = &prev + &Polynomial::var(above[j]);
            let upper = if j + 1 == n {
                &Polynomial::one() - &own
            } else {
                &prev - &own
            };
            out.push(Level {
                var: *v,
                upper,
                forced: j + 1 == n,
            });
            own = &own + &Polynomial::var(*v);
        }
    }
    out
}

/// Cells of `levels[idx..]`, with sections substituted into later bounds.
fn build(levels: &[Level], idx: usize, eqs: &BTreeMap<Var, Polynomial>, point: &BTreeMap<Var, Rational>) -> Vec<CadCell> {
    let Some(level) = levels.get(idx) else {
        return Vec::new();
    };
    let upper = level.upper.substitute_all(eqs);
    let u = upper.eval(point).expect("bounds only use earlier coordinates");
    let mut specs: Vec<(CellKind, Rational, Option<Polynomial>)> = Vec::new();
    if level.forced {
        specs.push((CellKind::Section(Bound::poly(upper.clone())), u, Some(upper)));
    } else if u.is_zero() {
        specs.push((CellKind::Section(Bound::zero()), u, Some(Polynomial::zero())));
    } else {
        specs.push((CellKind::Section(Bound::zero()), Rational::zero(), Some(Polynomial::zero())));
        specs.push((
            CellKind::Sector(Bound::zero(), Bound::poly(upper.clone())),
            &u / int(2),
            None,
        ));
        specs.push((CellKind::Section(Bound::poly(upper.clone())), u, Some(upper)));
    }
    specs
        .into_iter()
        .map(|(kind, sample, eq)| {
            let mut eqs = eqs.clone();
            if let Some(e) = eq {
                eqs.insert(level.var, e);
            }
            let mut point = point.clone();
            point.insert(level.var, sample.clone());
            let children = build(levels, idx + 1, &eqs, &point);
            CadCell {
                var: level.var,
                truth: if children.is_empty() { Some(true) } else { None },
                kind,
                sample: Real::Rational(sample),
                children,
            }
        })
        .collect()
}

pub(crate) fn levels_tree(vars: &Vars, levels: &[Level]) -> CadTree {
    let order = levels.iter().map(|l| l.var).collect();
    CadTree::new(vars.clone(), order, build(levels, 0, &BTreeMap::new(), &BTreeMap::new()))
}

/// The CAD of one simplex, coordinates in the listed order.
pub fn simplex_cad(vars: &Vars, spec: &SimplexSpec) -> Result<CadTree, SimplexError> {
    spec.validate(vars)?;
    Ok(levels_tree(vars, &simplex_levels(spec)))
}

/// Grafts a copy of `lower` under every leaf of `upper`.
pub(crate) fn graft(cells: &mut [CadCell], lower: &[CadCell]) {
    for c in cells.iter_mut() {
        if c.is_leaf() {
            c.truth = None;
            c.children = lower.to_vec();
        } else {
            graft(&mut c.children, lower);
        }
    }
}

/// Conjunction of independent simplices: every cell of each is combined
/// with every cell of the others.
pub fn glue_simplices(vars: &Vars, specs: &[SimplexSpec], parallel: bool) -> Result<CadTree, SimplexError> {
    let mut seen = BTreeSet::new();
    for s in specs {
        s.validate(vars)?;
        for v in &s.vars {
            if !seen.insert(*v) {
                return Err(SimplexError::SharedVariable(vars.name(*v).into()));
            }
        }
    }
    let trees = crate::par::map(specs.to_vec(), parallel, |s| levels_tree(vars, &simplex_levels(&s)));
    let mut order = Vec::new();
    let mut cells: Vec<CadCell> = Vec::new();
    for (i, t) in trees.into_iter().enumerate() {
        order.extend(t.order);
        if i == 0 {
            cells = t.cells;
        } else {
            graft(&mut cells, &t.cells);
        }
    }
    Ok(CadTree::new(vars.clone(), order, cells))
}

/// IFR CAD over `phi` rows of `phi` probabilities named `a<i>_<j>`.
pub fn ifr_cad(phi: usize) -> CadTree {
    let mut vars = Vars::new();
    let rows: Vec<SimplexSpec> = (0..phi)
        .map(|i| {
            let vs = (0..phi)
                .map(|j| {
                    vars.intern_kind(
                        &format!("a{}_{}", i + 1, j + 1),
                        VarKind::Alpha { simplex: i, position: j },
                    )
                })
                .collect();
            SimplexSpec::new(i, vs, SimplexConstraint::Eq(int(1)))
        })
        .collect();
    levels_tree(&vars, &ifr_levels(&rows))
}

/// The CAD of a system's simplex constraints: glued or IFR.
pub fn simplex_system_cad(sys: &SystemM, parallel: bool) -> Result<CadTree, SimplexError> {
    if sys.ifr {
        Ok(levels_tree(&sys.vars, &ifr_levels(&sys.simplices)))
    } else {
        glue_simplices(&sys.vars, &sys.simplices, parallel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::cad::{render_tree, RenderOptions};

    fn spec(vars: &mut Vars, prefix: &str, n: usize, c: SimplexConstraint) -> SimplexSpec {
        let vs = (1..=n).map(|j| vars.intern(&format!("{prefix}{j}"))).collect();
        SimplexSpec::new(0, vs, c)
    }

    #[test]
    fn simplex_leaf_counts() {
        let mut vs = Vars::new();
        let s3 = spec(&mut vs, "a", 3, SimplexConstraint::Eq(int(1)));
        assert_eq!(simplex_cad(&vs, &s3).unwrap().leaf_count(), 7);
        let s2 = spec(&mut vs, "b", 2, SimplexConstraint::Eq(int(1)));
        let t2 = simplex_cad(&vs, &s2).unwrap();
        assert_eq!(t2.leaf_count(), 3);
        assert_eq!(
            render_tree(&t2, RenderOptions { merge: false, show_truth: false }),
            "b1 = 0\n  b2 = 1\n0 < b1 < 1\n  b2 = 1 - b1\nb1 = 1\n  b2 = 0\n"
        );
        let l2 = spec(&mut vs, "c", 2, SimplexConstraint::Leq(rat(1, 2)));
        assert_eq!(simplex_cad(&vs, &l2).unwrap().leaf_count(), 7);
    }

    #[test]
    fn partial_structure_under_interior_cell() {
        let mut vs = Vars::new();
        let s3 = spec(&mut vs, "a", 3, SimplexConstraint::Eq(int(1)));
        let t = simplex_cad(&vs, &s3).unwrap();
        let mid = &t.cells[1];
        let kids: Vec<_> = mid.children.iter().map(|c| c.kind.clone()).collect();
        let a1 = vs.lookup("a1").unwrap();
        let u = &Polynomial::one() - &Polynomial::var(a1);
        assert_eq!(
            kids,
            alloc::vec![
                CellKind::Section(Bound::zero()),
                CellKind::Sector(Bound::zero(), Bound::poly(u.clone())),
                CellKind::Section(Bound::poly(u)),
            ]
        );
    }

    #[test]
    fn glue_is_product() {
        let mut vs = Vars::new();
        let a = spec(&mut vs, "a", 3, SimplexConstraint::Eq(int(1)));
        let b = spec(&mut vs, "b", 3, SimplexConstraint::Eq(int(1)));
        let g = glue_simplices(&vs, &[a.clone(), b.clone()], false).unwrap();
        assert_eq!(g.leaf_count(), 49);
        let one = glue_simplices(&vs, &[a.clone()], false).unwrap();
        assert_eq!(one, simplex_cad(&vs, &a).unwrap());
        assert!(matches!(
            glue_simplices(&vs, &[a.clone(), a], false),
            Err(SimplexError::SharedVariable(_))
        ));
    }

    #[test]
    fn ifr_two_states() {
        let t = ifr_cad(2);
        assert_eq!(t.leaf_count(), 7);
        let text = render_tree(&t, RenderOptions::default());
        assert_eq!(
            text,
            "a1_1 = 0\n  a1_2 = 1\n    a2_1 = 0\n      a2_2 = 1\n\
             0 < a1_1 <= 1\n  a1_2 = 1 - a1_1\n    0 <= a2_1 <= a1_1\n      a2_2 = 1 - a2_1\n"
        );
    }
}
