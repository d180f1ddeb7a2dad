use super::CadError;
use crate::arith::{isolate_real_roots, sign_at, Interval, Rational, Real, Sign, UPoly};
use crate::poly::{Polynomial, Var};
use crate::projection::resultant;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use num_traits::{Signed, Zero};

/// Refinement rounds tried with interval arithmetic before the exact test.
const QUICK_ROUNDS: usize = 24;

fn split_point(p: &Polynomial, point: &[(Var, Real)]) -> (Polynomial, Vec<(Var, Real)>) {
    let mut rationals = BTreeMap::new();
    let mut algebraic = Vec::new();
    for (v, r) in point {
        match r {
            Real::Rational(q) => {
                rationals.insert(*v, q.clone());
            }
            Real::Algebraic(_) => algebraic.push((*v, r.clone())),
        }
    }
    let q = p.substitute_rationals(&rationals);
    let used = q.vars();
    algebraic.retain(|(v, _)| used.contains(v));
    (q, algebraic)
}

pub(crate) fn eval_interval(p: &Polynomial, boxes: &[(Var, Interval)]) -> Interval {
    let mut acc = Interval::point(Rational::zero());
    for (m, c) in p.terms() {
        let mut t = Interval::point(c.clone());
        for (v, e) in m.vars() {
            let iv = boxes
                .iter()
                .find(|(w, _)| *w == v)
                .map(|(_, i)| i.clone())
                .expect("every variable has an enclosure");
            t = t.mul(&iv.pow(e));
        }
        acc = acc.add(&t);
    }
    acc
}

fn enclosures(point: &[(Var, Real)]) -> Vec<(Var, Interval)> {
    point.iter().map(|(v, r)| (*v, r.enclosure())).collect()
}

fn fresh_var(p: &Polynomial, point: &[(Var, Real)]) -> Var {
    let m = p
        .vars()
        .into_iter()
        .chain(point.iter().map(|(v, _)| *v))
        .map(|v| v.0)
        .max()
        .unwrap_or(0);
    Var(m + 1)
}

fn defining(v: Var, r: &Real) -> Polynomial {
    match r {
        Real::Algebraic(a) => Polynomial::from_upoly(v, a.poly()),
        Real::Rational(q) => Polynomial::from_upoly(v, &UPoly::linear_root(q.clone())),
    }
}

/// Eliminates every coordinate of `point` from `p` by iterated resultants
/// with the defining polynomials, innermost coordinate first.
fn iterated_resultant(p: &Polynomial, point: &[(Var, Real)]) -> Polynomial {
    let mut acc = p.clone();
    for (v, r) in point.iter().rev() {
        if acc.contains_var(*v) {
            acc = resultant(&defining(*v, r), &acc, *v);
        }
    }
    acc
}

/// Exact sign of a polynomial at a point with real-algebraic coordinates.
///
/// Interval enclosures settle most cases. Otherwise the value is a root of
/// the iterated resultant `M(z)` of `z - p`; nonzero roots of `M` are
/// bounded away from 0, so an enclosure inside that gap proves `p = 0`.
pub fn sign_at_point(p: &Polynomial, point: &[(Var, Real)]) -> Sign {
    let (q, mut alg) = split_point(p, point);
    if let Some(c) = q.constant_value() {
        return Sign::of(&c);
    }
    if alg.len() == 1 {
        let (v, r) = &alg[0];
        return sign_at(&q.to_upoly(*v).expect("single variable left"), r);
    }
    for _ in 0..QUICK_ROUNDS {
        if let Some(s) = eval_interval(&q, &enclosures(&alg)).strict_sign() {
            return s;
        }
        for (_, r) in alg.iter_mut() {
            r.refine();
        }
    }
    let z = fresh_var(&q, &alg);
    let shifted = &Polynomial::var(z) - &q;
    let m = iterated_resultant(&shifted, &alg)
        .to_upoly(z)
        .expect("all coordinates eliminated");
    let lead_zeros = m.coeffs().iter().take_while(|c| c.is_zero()).count();
    let m = UPoly::new(m.coeffs()[lead_zeros..].to_vec());
    let c0 = m.coeff(0).abs();
    let cmax = m.coeffs()[1..]
        .iter()
        .map(|c| c.abs())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    let gap = &c0 / (&c0 + cmax);
    loop {
        let e = eval_interval(&q, &enclosures(&alg));
        if let Some(s) = e.strict_sign() {
            return s;
        }
        if lead_zeros > 0 && e.within(&gap) {
            return Sign::Zero;
        }
        for (_, r) in alg.iter_mut() {
            r.refine();
        }
    }
}

/// Real roots of `p(point, y)` in `y`.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelRoots {
    Roots(Vec<Real>),
    /// The polynomial vanishes identically over the point.
    Nullified,
}

/// Isolates the real roots of `p` in `y` over a sample point.
pub fn roots_over(p: &Polynomial, point: &[(Var, Real)], y: Var) -> Result<LevelRoots, CadError> {
    let (q, alg) = split_point(p, point);
    if alg.is_empty() {
        let u = q.to_upoly(y).expect("only the lifting variable remains");
        if u.is_zero() {
            return Ok(LevelRoots::Nullified);
        }
        return Ok(LevelRoots::Roots(isolate_real_roots(&u)?));
    }
    let view = q.univariate_view(y);
    let top = match (0..view.len())
        .rev()
        .find(|&k| sign_at_point(&view[k], &alg) != Sign::Zero)
    {
        Some(k) => k,
        None => return Ok(LevelRoots::Nullified),
    };
    if top == 0 {
        return Ok(LevelRoots::Roots(Vec::new()));
    }
    let trimmed = Polynomial::from_univariate_view(y, &view[..=top]);
    let r = if alg.len() == 1 {
        // drop conjugates at which the leading coefficient vanishes
        let (v, a) = &alg[0];
        let m = defining(*v, a).to_upoly(*v).expect("univariate");
        let lead = view[top].to_upoly(*v).expect("univariate in the coordinate");
        let g = m.gcd(&lead);
        let m = if g.degree().unwrap_or(0) > 0 { m.div_rem(&g).0 } else { m };
        resultant(&Polynomial::from_upoly(*v, &m), &trimmed, *v)
    } else {
        iterated_resultant(&trimmed, &alg)
    };
    let ru = r.to_upoly(y).expect("coordinates eliminated");
    if ru.is_zero() {
        return Err(CadError::DegenerateLifting(
            "eliminant vanishes identically over the sample".into(),
        ));
    }
    let mut out = Vec::new();
    for cand in isolate_real_roots(&ru)? {
        let mut pt = alg.clone();
        pt.push((y, cand.clone()));
        if sign_at_point(&trimmed, &pt) == Sign::Zero {
            out.push(cand);
        }
    }
    Ok(LevelRoots::Roots(out))
}
