use super::{Bound, CadCell, CadTree, CellKind};
use crate::poly::{Polynomial, Vars};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy)]
pub struct RenderOptions {
    /// Merge adjacent sibling cells whose subtrees render identically.
    pub merge: bool,
    /// Append `[true]` / `[false]` to leaves.
    pub show_truth: bool,
}

impl Default for RenderOptions {
    fn default() -> RenderOptions {
        RenderOptions {
            merge: true,
            show_truth: false,
        }
    }
}

fn wrap(p: &Polynomial, vars: &Vars, as_denominator: bool) -> String {
    let s = p.render(vars);
    let simple = p.n_terms() == 1 && {
        let (_, c) = p.leading().expect("nonzero");
        if as_denominator {
            c == &crate::arith::int(1)
        } else {
            !s.starts_with('-')
        }
    };
    if simple || p.is_constant() && !as_denominator {
        s
    } else {
        format!("({s})")
    }
}

pub fn render_bound(b: &Bound, vars: &Vars) -> String {
    match b {
        Bound::NegInf => "-oo".into(),
        Bound::PosInf => "oo".into(),
        Bound::Value(r) => r.render(),
        Bound::Expr { num, den } => {
            if den == &Polynomial::one() {
                num.render(vars)
            } else {
                format!("{}/{}", wrap(num, vars, false), wrap(den, vars, true))
            }
        }
        Bound::Root { poly, index } => format!("root{index}({})", poly.render(vars)),
        Bound::PosRoot { poly } => format!("posroot({})", poly.render(vars)),
    }
}

/// Lower end (bound, closed) and upper end of a cell.
fn ends(c: &CadCell) -> ((&Bound, bool), (&Bound, bool)) {
    match &c.kind {
        CellKind::Section(b) => ((b, true), (b, true)),
        CellKind::Sector(lo, hi) => ((lo, false), (hi, false)),
    }
}

fn label(first: &CadCell, last: &CadCell, vars: &Vars) -> String {
    let name = vars.name(first.var);
    if core::ptr::eq(first, last) {
        if let CellKind::Section(b) = &first.kind {
            return format!("{name} = {}", render_bound(b, vars));
        }
    }
    let ((lo, lo_closed), _) = ends(first);
    let (_, (hi, hi_closed)) = ends(last);
    let lo_s = (!matches!(lo, Bound::NegInf)).then(|| render_bound(lo, vars));
    let hi_s = (!matches!(hi, Bound::PosInf)).then(|| render_bound(hi, vars));
    let op = |closed: bool| if closed { "<=" } else { "<" };
    match (lo_s, hi_s) {
        (Some(l), Some(h)) => format!("{l} {} {name} {} {h}", op(lo_closed), op(hi_closed)),
        (Some(l), None) => format!("{name} {} {l}", if lo_closed { ">=" } else { ">" }),
        (None, Some(h)) => format!("{name} {} {h}", op(hi_closed)),
        (None, None) => format!("-oo < {name} < oo"),
    }
}

fn render_level(cells: &[CadCell], depth: usize, vars: &Vars, opts: RenderOptions) -> Vec<String> {
    // subtree body (children + truth) of each cell, used for merging
    let bodies: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            let mut b = render_level(&c.children, depth + 1, vars, opts);
            if c.is_leaf() && opts.show_truth {
                b.push(format!("[{}]", c.truth.map(|t| if t { "true" } else { "false" }).unwrap_or("?")));
            }
            b
        })
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cells.len() {
        let mut j = i;
        let mut rep = i;
        if opts.merge {
            while j + 1 < cells.len() && adjacent(&cells[j], &cells[j + 1]) {
                match mergeable(&cells[i..=j + 1], &bodies[i..=j + 1], depth, vars, opts) {
                    Some(r) => {
                        rep = i + r;
                        j += 1;
                    }
                    None => break,
                }
            }
        }
        let mut line = format!("{}{}", "  ".repeat(depth), label(&cells[i], &cells[j], vars));
        let body = &bodies[rep];
        let mut rest: &[String] = body;
        if let Some(t) = body.last().filter(|t| t.starts_with('[')) {
            line.push(' ');
            line.push_str(t);
            rest = &body[..body.len() - 1];
        }
        out.push(line);
        out.extend(rest.iter().cloned());
        i = j + 1;
    }
    out
}

/// Index of the cell whose body stands for a merged run, if the run can be
/// merged: either every body is identical, or the run has one sector and
/// each section's body is the sector's body with the section value
/// substituted for the coordinate.
fn mergeable(cells: &[CadCell], bodies: &[Vec<String>], depth: usize, vars: &Vars, opts: RenderOptions) -> Option<usize> {
    if bodies.iter().all(|b| b == &bodies[0]) {
        return Some(0);
    }
    let sectors: Vec<usize> = (0..cells.len()).filter(|&k| !cells[k].is_section()).collect();
    let [s] = sectors.as_slice() else {
        return None;
    };
    let sector = &cells[*s];
    for (k, c) in cells.iter().enumerate() {
        if k == *s || bodies[k] == bodies[*s] {
            continue;
        }
        let CellKind::Section(b) = &c.kind else {
            return None;
        };
        let value = bound_poly(b)?;
        let moved: Vec<CadCell> = sector
            .children
            .iter()
            .map(|ch| substitute_cell(ch, c.var, &value))
            .collect::<Option<_>>()?;
        if c.is_leaf() || sector.is_leaf() || render_level(&moved, depth + 1, vars, opts) != bodies[k] {
            return None;
        }
    }
    Some(*s)
}

fn bound_poly(b: &Bound) -> Option<Polynomial> {
    match b {
        Bound::Value(r) => r.as_rational().map(|q| Polynomial::constant(q.clone())),
        Bound::Expr { num, den } => den
            .constant_value()
            .map(|d| num.scale(&(crate::arith::int(1) / d))),
        _ => None,
    }
}

fn substitute_bound(b: &Bound, v: crate::poly::Var, by: &Polynomial) -> Option<Bound> {
    Some(match b {
        Bound::Expr { num, den } => {
            let den = den.substitute(v, by);
            if den.is_zero() {
                return None;
            }
            Bound::ratio(num.substitute(v, by), den)
        }
        Bound::Root { poly, index } => Bound::Root {
            poly: poly.substitute(v, by),
            index: *index,
        },
        Bound::PosRoot { poly } => Bound::PosRoot {
            poly: poly.substitute(v, by),
        },
        other => other.clone(),
    })
}

fn substitute_cell(c: &CadCell, v: crate::poly::Var, by: &Polynomial) -> Option<CadCell> {
    Some(CadCell {
        var: c.var,
        kind: match &c.kind {
            CellKind::Section(b) => CellKind::Section(substitute_bound(b, v, by)?),
            CellKind::Sector(lo, hi) => CellKind::Sector(substitute_bound(lo, v, by)?, substitute_bound(hi, v, by)?),
        },
        sample: c.sample.clone(),
        truth: c.truth,
        children: c
            .children
            .iter()
            .map(|ch| substitute_cell(ch, v, by))
            .collect::<Option<_>>()?,
    })
}

/// Whether `b` starts where `a` ends.
fn adjacent(a: &CadCell, b: &CadCell) -> bool {
    let (_, (a_hi, a_closed)) = ends(a);
    let ((b_lo, b_closed), _) = ends(b);
    a_closed != b_closed && a_hi == b_lo
}

/// Indented text rendering, two spaces per level.
pub fn render_tree(tree: &CadTree, opts: RenderOptions) -> String {
    let mut lines = render_level(&tree.cells, 0, &tree.vars, opts);
    if lines.is_empty() {
        lines.push("false".into());
    }
    let mut s = lines.join("\n");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cad::{decision_cad, CadOptions, PolySystem};
    use crate::poly::Var;

    #[test]
    fn sphere_solution_tree() {
        let s = PolySystem::parse(&["x^2 + y^2 + z^2 - 1 <= 0"]).unwrap();
        let order: Vec<Var> = ["x", "y", "z"].iter().map(|n| s.vars.lookup(n).unwrap()).collect();
        let mut cad = decision_cad(&s, &order, &CadOptions::default()).unwrap();
        cad.tree.prune_false();
        let text = render_tree(&cad.tree, RenderOptions::default());
        let expected = "\
x = -1
  y = 0
    z = 0
-1 < x < 1
  y = root1(x^2 + y^2 - 1)
    z = root1(x^2 + y^2 + z^2 - 1)
  root1(x^2 + y^2 - 1) < y < root2(x^2 + y^2 - 1)
    root1(x^2 + y^2 + z^2 - 1) <= z <= root2(x^2 + y^2 + z^2 - 1)
  y = root2(x^2 + y^2 - 1)
    z = root1(x^2 + y^2 + z^2 - 1)
x = 1
  y = 0
    z = 0
";
        assert_eq!(text, expected);
    }
}
