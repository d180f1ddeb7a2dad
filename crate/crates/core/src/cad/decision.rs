use super::point::{roots_over, sign_at_point, LevelRoots};
use super::tree::{Bound, CadCell, CadTree, CellKind};
use super::{CadError, PolySystem};
use crate::arith::{compare, rational_between, Endpoint, Real};
use crate::poly::{canonical_cmp, Polynomial, Var, Vars};
use crate::projection::{hong_projection, normalize_factors, ProjectionFactorSet, ProjectionInput};
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

#[derive(Debug, Clone)]
pub struct CadOptions {
    pub projection_input: ProjectionInput,
    /// Abort once this many cells have been created.
    pub max_cells: Option<usize>,
    pub parallel: bool,
}

impl Default for CadOptions {
    fn default() -> CadOptions {
        CadOptions {
            projection_input: ProjectionInput::Normalized,
            max_cells: None,
            parallel: false,
        }
    }
}

/// Factors whose main variable is `var`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelFactors {
    pub var: Var,
    pub factors: Vec<Polynomial>,
}

/// A lifting factor that vanished identically over a base cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Nullification {
    pub level: usize,
    pub factor: Polynomial,
    /// Sample of the base cell.
    pub base_sample: Vec<Real>,
}

#[derive(Debug, Clone)]
pub struct DecisionCad {
    pub tree: CadTree,
    /// One entry per order position, lowest first.
    pub levels: Vec<LevelFactors>,
    /// Elimination steps from the last variable down; `projections[0]`
    /// eliminates the last variable of the order.
    pub projections: Vec<ProjectionFactorSet>,
    pub nullifications: Vec<Nullification>,
}

impl DecisionCad {
    /// Every factor from every level.
    pub fn all_factors(&self) -> Vec<Polynomial> {
        self.levels.iter().flat_map(|l| l.factors.iter().cloned()).collect()
    }
}

pub(crate) fn check_order(vars: &Vars, used: &BTreeSet<Var>, order: &[Var]) -> Result<(), CadError> {
    let mut seen = BTreeSet::new();
    for v in order {
        if !seen.insert(*v) {
            return Err(CadError::OrderDuplicate(vars.name(*v).into()));
        }
    }
    for v in used {
        if !seen.contains(v) {
            return Err(CadError::OrderMissing(vars.name(*v).into()));
        }
    }
    Ok(())
}

fn main_level(p: &Polynomial, order: &[Var]) -> Option<usize> {
    (0..order.len()).rev().find(|&i| p.contains_var(order[i]))
}

struct Lifter<'a> {
    system: &'a PolySystem,
    order: &'a [Var],
    levels: &'a [LevelFactors],
    opts: &'a CadOptions,
    cells: AtomicUsize,
}

struct LevelOutcome {
    cells: Vec<CadCell>,
    nullified: Vec<Nullification>,
}

impl Lifter<'_> {
    fn note_cells(&self, n: usize) -> Result<(), CadError> {
        let total = self.cells.fetch_add(n, AtomicOrdering::Relaxed) + n;
        match self.opts.max_cells {
            Some(m) if total > m => Err(CadError::CellLimit(m)),
            _ => Ok(()),
        }
    }

    /// Cells of level `k` over a base sample (coordinates of `order[..k]`).
    fn stack(&self, k: usize, base: &[(Var, Real)], base_is_point: bool) -> Result<LevelOutcome, CadError> {
        let y = self.order[k];
        let mut nullified = Vec::new();
        // (root, factor index, 1-based root index)
        let mut roots: Vec<(Real, usize, usize)> = Vec::new();
        for (fi, f) in self.levels[k].factors.iter().enumerate() {
            match roots_over(f, base, y)? {
                LevelRoots::Nullified => nullified.push(Nullification {
                    level: k,
                    factor: f.clone(),
                    base_sample: base.iter().map(|(_, r)| r.clone()).collect(),
                }),
                LevelRoots::Roots(rs) => {
                    for (ri, r) in rs.into_iter().enumerate() {
                        match roots
                            .binary_search_by(|(e, _, _)| compare(e, &r))
                        {
                            Ok(_) => {}
                            Err(pos) => roots.insert(pos, (r, fi, ri + 1)),
                        }
                    }
                }
            }
        }
        let bound_of = |(r, fi, idx): &(Real, usize, usize)| -> Bound {
            if base_is_point {
                return Bound::Value(r.clone());
            }
            let f = &self.levels[k].factors[*fi];
            if f.degree_in(y) == 1 {
                let view = f.univariate_view(y);
                Bound::ratio(-&view[0], view[1].clone())
            } else {
                Bound::Root {
                    poly: f.clone(),
                    index: *idx,
                }
            }
        };
        let mut cells = Vec::with_capacity(2 * roots.len() + 1);
        let mut lo_b = Bound::NegInf;
        let mut lo_e = Endpoint::NegInf;
        for root in &roots {
            let b = bound_of(root);
            let e = Endpoint::Finite(root.0.clone());
            let s = rational_between(&lo_e, &e)?;
            cells.push(leaf(y, CellKind::Sector(lo_b.clone(), b.clone()), Real::Rational(s)));
            cells.push(leaf(y, CellKind::Section(b.clone()), root.0.clone()));
            lo_b = b;
            lo_e = e;
        }
        let s = rational_between(&lo_e, &Endpoint::PosInf)?;
        cells.push(leaf(y, CellKind::Sector(lo_b, Bound::PosInf), Real::Rational(s)));
        self.note_cells(cells.len())?;
        Ok(LevelOutcome { cells, nullified })
    }

    fn build(&self, k: usize, base: Vec<(Var, Real)>, base_is_point: bool) -> Result<(Vec<CadCell>, Vec<Nullification>), CadError> {
        let LevelOutcome { cells, mut nullified } = self.stack(k, &base, base_is_point)?;
        let last = k + 1 == self.order.len();
        let jobs: Vec<(CadCell, Vec<(Var, Real)>)> = cells
            .into_iter()
            .map(|c| {
                let mut pt = base.clone();
                pt.push((c.var, c.sample.clone()));
                (c, pt)
            })
            .collect();
        let results = crate::par::map(jobs, self.opts.parallel, |(mut c, pt)| -> Result<(CadCell, Vec<Nullification>), CadError> {
            if last {
                c.truth = Some(self.truth_at(&pt));
                Ok((c, Vec::new()))
            } else {
                let point = base_is_point && c.is_section();
                let (children, nul) = self.build(k + 1, pt, point)?;
                c.children = children;
                Ok((c, nul))
            }
        });
        let mut out = Vec::with_capacity(results.len());
        for r in results {
            let (c, nul) = r?;
            nullified.extend(nul);
            out.push(c);
        }
        Ok((out, nullified))
    }

    fn truth_at(&self, pt: &[(Var, Real)]) -> bool {
        self.system
            .atoms
            .iter()
            .all(|a| a.rel.holds(sign_at_point(&a.poly, pt)))
    }
}

fn leaf(var: Var, kind: CellKind, sample: Real) -> CadCell {
    CadCell {
        var,
        kind,
        sample,
        truth: None,
        children: Vec::new(),
    }
}

/// Full decision CAD of a conjunctive system: projection down the order,
/// then lifting with exact sample points. Every leaf carries the truth of
/// the system at its sample.
pub fn decision_cad(system: &PolySystem, order: &[Var], opts: &CadOptions) -> Result<DecisionCad, CadError> {
    check_order(&system.vars, &system.used_vars(), order)?;
    let n = order.len();
    let mut pools: Vec<Vec<Polynomial>> = alloc::vec![Vec::new(); n];
    let top: Vec<Polynomial> = system.polys().into_iter().filter(|p| !p.is_constant()).collect();
    let mut projections = Vec::new();
    let mut current: Vec<Polynomial> = match opts.projection_input {
        ProjectionInput::Raw => {
            let mut t = top.clone();
            t.sort_by(canonical_cmp);
            t.dedup();
            t
        }
        ProjectionInput::Normalized => normalize_factors(&top),
    };
    for k in (0..n).rev() {
        for p in &current {
            if let Some(l) = main_level(p, order) {
                if l == k {
                    pools[k].push(p.clone());
                }
            }
        }
        if k == 0 {
            break;
        }
        let proj = hong_projection(&current, order[k]);
        let next = proj.next_input(opts.projection_input);
        projections.push(proj);
        current = next;
    }
    let levels: Vec<LevelFactors> = (0..n)
        .map(|k| LevelFactors {
            var: order[k],
            factors: normalize_factors(&pools[k]),
        })
        .collect();
    let lifter = Lifter {
        system,
        order,
        levels: &levels,
        opts,
        cells: AtomicUsize::new(0),
    };
    let (cells, nullifications) = if n == 0 {
        (Vec::new(), Vec::new())
    } else {
        lifter.build(0, Vec::new(), true)?
    };
    Ok(DecisionCad {
        tree: CadTree::new(system.vars.clone(), order.to_vec(), cells),
        levels,
        projections,
        nullifications,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> (PolySystem, Vec<Var>) {
        let s = PolySystem::parse(&["x^2 + y^2 + z^2 - 1 <= 0"]).unwrap();
        let order = ["x", "y", "z"].iter().map(|n| s.vars.lookup(n).unwrap()).collect();
        (s, order)
    }

    #[test]
    fn sphere_cell_structure() {
        let (s, order) = sphere();
        let cad = decision_cad(&s, &order, &CadOptions::default()).unwrap();
        assert_eq!(cad.tree.cells.len(), 5);
        assert_eq!(cad.tree.leaf_count(), 25);
        assert_eq!(cad.tree.true_leaf_count(), 7);
    }

    #[test]
    fn raw_mode_gives_same_cells() {
        let (s, order) = sphere();
        let opts = CadOptions {
            projection_input: ProjectionInput::Raw,
            ..CadOptions::default()
        };
        let cad = decision_cad(&s, &order, &opts).unwrap();
        assert_eq!(cad.tree.leaf_count(), 25);
        assert_eq!(cad.projections[1].raw.len(), 9);
    }

    #[test]
    fn cell_limit() {
        let (s, order) = sphere();
        let opts = CadOptions {
            max_cells: Some(10),
            ..CadOptions::default()
        };
        assert_eq!(decision_cad(&s, &order, &opts).unwrap_err(), CadError::CellLimit(10));
    }

    #[test]
    fn order_must_cover_variables() {
        let (s, order) = sphere();
        assert!(matches!(decision_cad(&s, &order[..2], &CadOptions::default()), Err(CadError::OrderMissing(_))));
    }
}
