use super::MarkovError;
use crate::arith::{format_rational, Rational, Sign};
use crate::poly::{Polynomial, Var, Vars};
use crate::simplex::{SimplexConstraint, SystemM};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// Shape of the feasible region of a two-parameter restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryClass {
    /// Linear in both parameters.
    HalfPlane,
    /// Bilinear: one side of a hyperbola.
    HyperbolaSide,
    /// Both parameters on one equality simplex with all else fixed.
    LineSegment,
    /// Only one of the pair survives.
    UnivariateReduction,
    /// Neither parameter survives.
    Degenerate,
}

impl GeometryClass {
    pub fn label(self) -> &'static str {
        match self {
            GeometryClass::HalfPlane => "half-plane",
            GeometryClass::HyperbolaSide => "hyperbola-side",
            GeometryClass::LineSegment => "line-segment",
            GeometryClass::UnivariateReduction => "univariate-reduction",
            GeometryClass::Degenerate => "degenerate: f* constant in pair",
        }
    }
}

/// `f*` restricted to a pair of free parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoWay {
    pub u: Var,
    pub v: Var,
    pub fixed: BTreeMap<Var, Rational>,
    pub restricted: Polynomial,
    pub class: GeometryClass,
}

pub fn classify_two_way(
    sys: &SystemM,
    u: Var,
    v: Var,
    fixed: &BTreeMap<Var, Rational>,
) -> Result<TwoWay, MarkovError> {
    if u == v {
        return Err(MarkovError::TwoWay("the pair must be two distinct parameters".into()));
    }
    if fixed.contains_key(&u) || fixed.contains_key(&v) {
        return Err(MarkovError::TwoWay("a pair member is also fixed".into()));
    }
    let restricted = sys.fstar.substitute_rationals(fixed);
    if let Some(w) = restricted.vars().into_iter().find(|w| *w != u && *w != v) {
        return Err(MarkovError::TwoWay(format!(
            "'{}' is neither in the pair nor fixed",
            sys.vars.name(w)
        )));
    }
    let (du, dv) = (restricted.degree_in(u), restricted.degree_in(v));
    if du > 1 || dv > 1 {
        return Err(MarkovError::TwoWay("restriction is not multilinear in the pair".into()));
    }
    let same_eq_simplex = match (sys.simplex_of(u), sys.simplex_of(v)) {
        (Some(a), Some(b)) if a == b => {
            let s = &sys.simplices[a];
            matches!(s.constraint, SimplexConstraint::Eq(_))
                && s.vars.iter().all(|w| *w == u || *w == v || fixed.contains_key(w))
        }
        _ => false,
    };
    let bilinear = restricted.terms().any(|(m, _)| m.exp(u) > 0 && m.exp(v) > 0);
    let class = match (du, dv) {
        (0, 0) => GeometryClass::Degenerate,
        _ if same_eq_simplex => GeometryClass::LineSegment,
        (0, _) | (_, 0) => GeometryClass::UnivariateReduction,
        _ if bilinear => GeometryClass::HyperbolaSide,
        _ => GeometryClass::HalfPlane,
    };
    Ok(TwoWay {
        u,
        v,
        fixed: fixed.clone(),
        restricted,
        class,
    })
}

/// Exact points on `f* = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Boundary {
    /// `(u, v)` pairs.
    pub points: Vec<(Rational, Rational)>,
    /// Abscissae where the solved-for coefficient vanishes.
    pub skipped: Vec<Rational>,
    pub solved_for: Var,
    /// `name = expression` for the solved variable.
    pub closed_form: String,
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn lattice(lo: &Rational, hi: &Rational, n: usize) -> Vec<Rational> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo.clone()],
        _ => {
            let step = (hi - lo) / Rational::from_integer(((n - 1) as i64).into());
            (0..n)
                .map(|k| lo + &step * Rational::from_integer((k as i64).into()))
                .collect()
        }
    }
}

/// Solves the restriction for a variable it is linear in, at `samples`
/// abscissae spread over `range` of the other variable.
pub fn boundary_curve(
    tw: &TwoWay,
    vars: &Vars,
    range: (&Rational, &Rational),
    samples: usize,
) -> Result<Boundary, MarkovError> {
    let f = &tw.restricted;
    let (solve, other) = if f.degree_in(tw.v) == 1 {
        (tw.v, tw.u)
    } else if f.degree_in(tw.u) == 1 {
        (tw.u, tw.v)
    } else {
        return Err(MarkovError::TwoWay("f* does not depend on the pair".into()));
    };
    let a = f.coeff_in(solve, 0);
    let b = f.coeff_in(solve, 1);
    let neg_a = -&a;
    let closed_form = match b.constant_value() {
        Some(c) => format!(
            "{} = {}",
            vars.name(solve),
            neg_a.scale(&(Rational::from_integer(1.into()) / c)).render(vars)
        ),
        None => format!("{} = ({})/({})", vars.name(solve), neg_a.render(vars), b.render(vars)),
    };
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for t in lattice(range.0, range.1, samples) {
        let bt = b.substitute_rational(other, &t).constant_term();
        if bt == Rational::from_integer(0.into()) {
            skipped.push(t);
            continue;
        }
        let s = neg_a.substitute_rational(other, &t).constant_term() / bt;
        points.push(if solve == tw.v { (t, s) } else { (s, t) });
    }
    Ok(Boundary {
        points,
        skipped,
        solved_for: solve,
        closed_form,
    })
}

impl Boundary {
    pub fn abscissa_label(&self, vars: &Vars, tw: &TwoWay) -> String {
        let other = if self.solved_for == tw.v { tw.u } else { tw.v };
        String::from(vars.name(other))
    }

    pub fn render_points(&self) -> Vec<(String, String)> {
        self.points
            .iter()
            .map(|(a, b)| (format_rational(a), format_rational(b)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridRow {
    pub u: Rational,
    pub v: Rational,
    pub satisfied: bool,
    pub on_boundary: bool,
}

/// Exact evaluation on an `n_u x n_v` lattice. A point is satisfied when
/// `f* >= 0` and every system constraint that only involves the pair
/// (after fixing) holds.
pub fn grid_compare(
    sys: &SystemM,
    tw: &TwoWay,
    u_box: (&Rational, &Rational),
    v_box: (&Rational, &Rational),
    n: (usize, usize),
) -> Result<Vec<GridRow>, MarkovError> {
    if n.0 < 2 || n.1 < 2 {
        return Err(MarkovError::TwoWay("grid needs at least 2 points per axis".into()));
    }
    let constraints: Vec<_> = sys
        .to_poly_system()
        .atoms
        .into_iter()
        .skip(1)
        .map(|a| (a.poly.substitute_rationals(&tw.fixed), a.rel))
        .filter(|(p, _)| p.vars().iter().all(|w| *w == tw.u || *w == tw.v))
        .collect();
    let mut rows = Vec::new();
    for u in lattice(u_box.0, u_box.1, n.0) {
        for v in lattice(v_box.0, v_box.1, n.1) {
            let mut pt = BTreeMap::new();
            pt.insert(tw.u, u.clone());
            pt.insert(tw.v, v.clone());
            let val = tw.restricted.eval(&pt).expect("restriction only uses the pair");
            let sign = Sign::of(&val);
            let inside = constraints
                .iter()
                .all(|(p, rel)| rel.holds(Sign::of(&p.eval(&pt).expect("pair only"))));
            rows.push(GridRow {
                u: u.clone(),
                v,
                satisfied: inside && sign != Sign::Negative,
                on_boundary: sign == Sign::Zero,
            });
        }
    }
    Ok(rows)
}
