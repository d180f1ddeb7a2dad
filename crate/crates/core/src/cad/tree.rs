use crate::arith::{compare, isolate_real_roots, Rational, Real};
use crate::poly::{Polynomial, Var, Vars};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

/// Boundary of a cell in its own coordinate, as a function of the
/// coordinates before it.
#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    NegInf,
    PosInf,
    /// A fixed number.
    Value(Real),
    /// `num / den`, both free of the cell's own variable.
    Expr { num: Polynomial, den: Polynomial },
    /// The `index`-th (1-based) real root of `poly` in the cell variable.
    Root { poly: Polynomial, index: usize },
    /// The unique positive real root of `poly` in the cell variable.
    PosRoot { poly: Polynomial },
}

impl Bound {
    pub fn rational(q: Rational) -> Bound {
        Bound::Value(Real::Rational(q))
    }

    pub fn zero() -> Bound {
        Bound::rational(Rational::from_integer(0.into()))
    }

    /// Ratio constructor; a constant denominator is folded into `num`.
    pub fn ratio(num: Polynomial, den: Polynomial) -> Bound {
        match den.constant_value() {
            Some(d) => {
                let p = num.scale(&(Rational::from_integer(1.into()) / d));
                match p.constant_value() {
                    Some(c) => Bound::rational(c),
                    None => Bound::Expr {
                        num: p,
                        den: Polynomial::one(),
                    },
                }
            }
            None => Bound::Expr { num, den },
        }
    }

    pub fn poly(p: Polynomial) -> Bound {
        Bound::ratio(p, Polynomial::one())
    }

    /// Value of the bound at a rational point of the preceding coordinates.
    pub fn eval(&self, var: Var, point: &BTreeMap<Var, Rational>) -> Option<Real> {
        match self {
            Bound::NegInf | Bound::PosInf => None,
            Bound::Value(r) => Some(r.clone()),
            Bound::Expr { num, den } => {
                let d = den.eval(point)?;
                if d == Rational::from_integer(0.into()) {
                    return None;
                }
                Some(Real::Rational(num.eval(point)? / d))
            }
            Bound::Root { poly, index } => {
                let mut base = point.clone();
                base.remove(&var);
                let u = poly.substitute_rationals(&base).to_upoly(var)?;
                let roots = isolate_real_roots(&u).ok()?;
                roots.get(index.checked_sub(1)?).cloned()
            }
            Bound::PosRoot { poly } => {
                let mut base = point.clone();
                base.remove(&var);
                let u = poly.substitute_rationals(&base).to_upoly(var)?;
                isolate_real_roots(&u)
                    .ok()?
                    .into_iter()
                    .find(|r| compare(r, &Real::zero()) == Ordering::Greater)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellKind {
    /// `var = bound`
    Section(Bound),
    /// `lo < var < hi`
    Sector(Bound, Bound),
}

/// Node of a CAD tree; the root cells partition the first coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct CadCell {
    pub var: Var,
    pub kind: CellKind,
    /// Sample value of this cell's coordinate.
    pub sample: Real,
    /// Truth value at leaves; `None` on inner nodes.
    pub truth: Option<bool>,
    pub children: Vec<CadCell>,
}

impl CadCell {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn is_section(&self) -> bool {
        matches!(self.kind, CellKind::Section(_))
    }

    fn count_leaves(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children.iter().map(CadCell::count_leaves).sum()
        }
    }

    fn count_nodes(&self) -> usize {
        1 + self.children.iter().map(CadCell::count_nodes).sum::<usize>()
    }

    fn contains(&self, point: &BTreeMap<Var, Rational>) -> Option<bool> {
        let x = Real::Rational(point.get(&self.var)?.clone());
        Some(match &self.kind {
            CellKind::Section(b) => compare(&b.eval(self.var, point)?, &x) == Ordering::Equal,
            CellKind::Sector(lo, hi) => {
                let above = match lo {
                    Bound::NegInf => true,
                    b => compare(&x, &b.eval(self.var, point)?) == Ordering::Greater,
                };
                let below = match hi {
                    Bound::PosInf => true,
                    b => compare(&x, &b.eval(self.var, point)?) == Ordering::Less,
                };
                above && below
            }
        })
    }

}

/// Keeps true leaves and the branches leading to them.
fn prune_cells(cells: &mut Vec<CadCell>) {
    cells.retain_mut(|c| {
        if c.is_leaf() {
            c.truth == Some(true)
        } else {
            prune_cells(&mut c.children);
            !c.children.is_empty()
        }
    });
}

/// Child indices from the root to a cell.
pub type CellPath = Vec<usize>;

/// A leaf together with the cells on its path.
#[derive(Debug, Clone)]
pub struct LeafRef<'a> {
    pub path: CellPath,
    pub cells: Vec<&'a CadCell>,
}

impl LeafRef<'_> {
    pub fn leaf(&self) -> &CadCell {
        self.cells.last().expect("nonempty path")
    }

    pub fn sample(&self) -> Vec<(Var, Real)> {
        self.cells.iter().map(|c| (c.var, c.sample.clone())).collect()
    }

    /// Rational sample, when every coordinate is rational.
    pub fn rational_sample(&self) -> Option<BTreeMap<Var, Rational>> {
        self.cells
            .iter()
            .map(|c| c.sample.as_rational().map(|q| (c.var, q.clone())))
            .collect()
    }

    pub fn truth(&self) -> bool {
        self.leaf().truth == Some(true)
    }

    /// Number of sector coordinates.
    pub fn dimension(&self) -> usize {
        self.cells.iter().filter(|c| !c.is_section()).count()
    }
}

/// A cylindrical decomposition over `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct CadTree {
    pub vars: Vars,
    pub order: Vec<Var>,
    pub cells: Vec<CadCell>,
    /// False leaves removed by pruning.
    pub pruned_false: usize,
}

impl CadTree {
    pub fn new(vars: Vars, order: Vec<Var>, cells: Vec<CadCell>) -> CadTree {
        CadTree {
            vars,
            order,
            cells,
            pruned_false: 0,
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.cells.iter().map(CadCell::count_leaves).sum()
    }

    pub fn node_count(&self) -> usize {
        self.cells.iter().map(CadCell::count_nodes).sum()
    }

    pub fn leaves(&self) -> Vec<LeafRef<'_>> {
        fn walk<'a>(c: &'a CadCell, path: &mut CellPath, cells: &mut Vec<&'a CadCell>, out: &mut Vec<LeafRef<'a>>) {
            cells.push(c);
            if c.is_leaf() {
                out.push(LeafRef {
                    path: path.clone(),
                    cells: cells.clone(),
                });
            } else {
                for (i, ch) in c.children.iter().enumerate() {
                    path.push(i);
                    walk(ch, path, cells, out);
                    path.pop();
                }
            }
            cells.pop();
        }
        let mut out = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            let mut path = alloc::vec![i];
            let mut cells = Vec::new();
            walk(c, &mut path, &mut cells, &mut out);
        }
        out
    }

    pub fn true_leaf_count(&self) -> usize {
        self.leaves().iter().filter(|l| l.truth()).count()
    }

    /// Leaf containing a rational point (keys must cover `order`).
    pub fn locate(&self, point: &BTreeMap<Var, Rational>) -> Option<LeafRef<'_>> {
        let mut level: &[CadCell] = &self.cells;
        let mut path = Vec::new();
        let mut cells = Vec::new();
        loop {
            let (i, c) = level
                .iter()
                .enumerate()
                .find(|(_, c)| c.contains(point) == Some(true))?;
            path.push(i);
            cells.push(c);
            if c.is_leaf() {
                return Some(LeafRef { path, cells });
            }
            level = &c.children;
        }
    }

    /// Membership of a rational point in the union of true leaves.
    pub fn satisfied_at(&self, point: &BTreeMap<Var, Rational>) -> bool {
        self.locate(point).map(|l| l.truth()).unwrap_or(false)
    }

    /// Drops false leaves (and branches left without leaves), recording the
    /// count in `pruned_false`.
    pub fn prune_false(&mut self) -> usize {
        let false_leaves = self.leaves().iter().filter(|l| l.leaf().truth != Some(true)).count();
        prune_cells(&mut self.cells);
        self.pruned_false += false_leaves;
        false_leaves
    }

    pub fn cell_at(&self, path: &[usize]) -> Option<&CadCell> {
        let mut c = self.cells.get(*path.first()?)?;
        for &i in &path[1..] {
            c = c.children.get(i)?;
        }
        Some(c)
    }
}
