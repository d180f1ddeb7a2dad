use super::{Monomial, PolyError, Var, Vars};
use crate::arith::{push_term, Rational, UPoly};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Neg, Sub};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Sparse polynomial with rational coefficients under graded-lex order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Polynomial {
        Polynomial::from_term(Monomial::one(), c)
    }

    pub fn var(v: Var) -> Polynomial {
        Polynomial::from_term(Monomial::var(v, 1), Rational::one())
    }

    pub fn from_term(m: Monomial, c: Rational) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.constant_term())
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Degree in `v`; the zero polynomial has degree 0.
    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.vars().map(|(v, _)| v))
            .collect()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    /// Largest monomial and its coefficient.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Coefficients of `v^0, v^1, ..., v^deg` as polynomials free of `v`.
    pub fn univariate_view(&self, v: Var) -> Vec<Polynomial> {
        let mut out = vec![Polynomial::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let e = m.exp(v);
            out[e as usize].add_term(m.with_exp(v, 0), c.clone());
        }
        out
    }

    pub fn from_univariate_view(v: Var, coeffs: &[Polynomial]) -> Polynomial {
        let mut out = Polynomial::zero();
        for (k, c) in coeffs.iter().enumerate() {
            let m = Monomial::var(v, k as u32);
            for (cm, cc) in &c.terms {
                out.add_term(cm.mul(&m), cc.clone());
            }
        }
        out
    }

    pub fn coeff_in(&self, v: Var, k: u32) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            if m.exp(v) == k {
                out.add_term(m.with_exp(v, 0), c.clone());
            }
        }
        out
    }

    pub fn leading_coeff(&self, v: Var) -> Result<Polynomial, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroLeadingCoefficient);
        }
        Ok(self.coeff_in(v, self.degree_in(v)))
    }

    pub fn leading_term(&self, v: Var) -> Result<Polynomial, PolyError> {
        let d = self.degree_in(v);
        Ok(self.leading_coeff(v)?.mul_monomial(&Monomial::var(v, d)))
    }

    /// `self` minus its leading term in `v`; zero for the zero polynomial.
    pub fn reductum(&self, v: Var) -> Polynomial {
        match self.leading_term(v) {
            Ok(lt) => self - &lt,
            Err(_) => Polynomial::zero(),
        }
    }

    /// Successive nonzero reducta `f, red f, red^2 f, ...`.
    pub fn reducta_set(&self, v: Var) -> Vec<Polynomial> {
        let mut out = Vec::new();
        let mut cur = self.clone();
        while !cur.is_zero() {
            let next = cur.reductum(v);
            out.push(cur);
            cur = next;
        }
        out
    }

    pub fn derivative(&self, v: Var) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e > 0 {
                out.add_term(m.with_exp(v, e - 1), c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    /// Replaces `v` by the polynomial `by`.
    pub fn substitute(&self, v: Var, by: &Polynomial) -> Polynomial {
        if !self.contains_var(v) {
            return self.clone();
        }
        let view = self.univariate_view(v);
        let mut out = Polynomial::zero();
        for c in view.iter().rev() {
            out = &(&out * by) + c;
        }
        out
    }

    pub fn substitute_rational(&self, v: Var, q: &Rational) -> Polynomial {
        if !self.contains_var(v) {
            return self.clone();
        }
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            out.add_term(m.with_exp(v, 0), c * num_traits::pow(q.clone(), e as usize));
        }
        out
    }

    pub fn substitute_all(&self, map: &BTreeMap<Var, Polynomial>) -> Polynomial {
        let mut out = self.clone();
        for (v, p) in map {
            out = out.substitute(*v, p);
        }
        out
    }

    pub fn substitute_rationals(&self, map: &BTreeMap<Var, Rational>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut exps = m.exps().to_vec();
            for (v, q) in map {
                if let Some(e) = exps.get_mut(v.index()) {
                    if *e > 0 {
                        coeff *= num_traits::pow(q.clone(), *e as usize);
                        *e = 0;
                    }
                }
            }
            out.add_term(Monomial::from_exps(exps), coeff);
        }
        out
    }

    /// Value at a rational assignment covering every variable present.
    pub fn eval(&self, assign: &BTreeMap<Var, Rational>) -> Option<Rational> {
        self.substitute_rationals(assign).constant_value()
    }

    pub fn eval_with<F: Fn(Var) -> Rational>(&self, f: F) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.vars() {
                t *= num_traits::pow(f(v), e as usize);
            }
            acc += t;
        }
        acc
    }

    /// Univariate view when no variable other than `v` occurs.
    pub fn to_upoly(&self, v: Var) -> Option<UPoly> {
        if self.vars().iter().any(|&w| w != v) {
            return None;
        }
        let mut cs = vec![Rational::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            cs[m.exp(v) as usize] = c.clone();
        }
        Some(UPoly::new(cs))
    }

    pub fn from_upoly(v: Var, p: &UPoly) -> Polynomial {
        Polynomial::from_terms(
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| (Monomial::var(v, k as u32), c.clone())),
        )
    }

    /// Integer coefficients with unit content and positive leading coefficient.
    pub fn primitive(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut lcm = BigInt::one();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(&(c * Rational::from_integer(lcm.clone())).to_integer());
        }
        let mut s = Rational::new(lcm, g);
        if self.leading().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            s = -s;
        }
        self.scale(&s)
    }

    /// Whether `self = c * other` for some nonzero rational `c`.
    pub fn is_proportional(&self, other: &Polynomial) -> bool {
        !self.is_zero() && !other.is_zero() && self.primitive() == other.primitive()
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quo = Polynomial::zero();
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.div(&dm)?;
            let c = rc / &dc;
            let t = Polynomial::from_term(m, c);
            rem = &rem - &(&t * d);
            quo = &quo + &t;
        }
        Some(quo)
    }

    /// Deterministic text rendering with `^` and `*`, terms in descending
    /// graded-lex order. A positive constant moves to the front when the
    /// leading coefficient is negative, so `1 - a1` reads naturally.
    pub fn render(&self, vars: &Vars) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut order: Vec<(&Monomial, &Rational)> = self.terms.iter().rev().collect();
        let lead_negative = order[0].1.is_negative();
        if lead_negative {
            if let Some(pos) = order.iter().position(|(m, c)| m.is_one() && c.is_positive()) {
                let t = order.remove(pos);
                order.insert(0, t);
            }
        }
        let mut out = String::new();
        for (m, c) in order {
            push_term(&mut out, c, &render_monomial(m, vars));
        }
        out
    }

    /// Number of distinct variables.
    pub fn n_vars(&self) -> usize {
        self.vars().len()
    }
}

pub(crate) fn render_monomial(m: &Monomial, vars: &Vars) -> String {
    use alloc::format;
    let mut parts: Vec<String> = Vec::new();
    for (v, e) in m.vars() {
        let name = if v.index() < vars.len() {
            String::from(vars.name(v))
        } else {
            format!("v{}", v.0)
        };
        parts.push(if e == 1 { name } else { format!("{name}^{e}") });
    }
    parts.join("*")
}

/// Total order on polynomials used for pair enumeration and canonical sets:
/// total degree, number of terms, monomials from the largest down, then
/// coefficients by magnitude with positive before negative.
pub fn canonical_cmp(a: &Polynomial, b: &Polynomial) -> Ordering {
    a.total_degree()
        .cmp(&b.total_degree())
        .then(a.n_terms().cmp(&b.n_terms()))
        .then_with(|| {
            let am = a.terms.keys().rev();
            let bm = b.terms.keys().rev();
            am.cmp(bm)
        })
        .then_with(|| {
            for (x, y) in a.terms.values().rev().zip(b.terms.values().rev()) {
                let o = x
                    .abs()
                    .cmp(&y.abs())
                    .then(y.is_positive().cmp(&x.is_positive()));
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, o: Polynomial) -> Polynomial {
        &self + &o
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, o: Polynomial) -> Polynomial {
        &self - &o
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, o: Polynomial) -> Polynomial {
        &self * &o
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::poly::parse_polynomial;

    fn setup() -> (Vars, Var, Var) {
        let mut vs = Vars::new();
        let x = vs.intern("x");
        let y = vs.intern("y");
        (vs, x, y)
    }

    #[test]
    fn leading_data_and_reducta() {
        let (mut vs, _x, y) = setup();
        let f = parse_polynomial("x^2*y^2 + 3*y^2 + x*y - 1", &mut vs).unwrap();
        let lc = f.leading_coeff(y).unwrap();
        assert_eq!(lc.render(&vs), "x^2 + 3");
        let red = f.reductum(y);
        assert_eq!(red.render(&vs), "x*y - 1");
        assert_eq!(f.reducta_set(y).len(), 3);
        assert_eq!(Polynomial::zero().leading_coeff(y), Err(PolyError::ZeroLeadingCoefficient));
    }

    #[test]
    fn renders_negative_leading_with_constant_first() {
        let (mut vs, _, _) = setup();
        let p = parse_polynomial("4 - 4*x^2 - 4*y^2", &mut vs).unwrap();
        assert_eq!(p.render(&vs), "4 - 4*x^2 - 4*y^2");
        let q = parse_polynomial("x^2 + y^2 - 1", &mut vs).unwrap();
        assert_eq!(q.render(&vs), "x^2 + y^2 - 1");
        let r = parse_polynomial("1/2*x - 3/4", &mut vs).unwrap();
        assert_eq!(r.render(&vs), "1/2*x - 3/4");
    }

    #[test]
    fn exact_division() {
        let (mut vs, _, _) = setup();
        let a = parse_polynomial("x^2 - y^2", &mut vs).unwrap();
        let b = parse_polynomial("x + y", &mut vs).unwrap();
        assert_eq!(a.div_exact(&b).unwrap().render(&vs), "x - y");
        let c = parse_polynomial("x + 2", &mut vs).unwrap();
        assert!(a.div_exact(&c).is_none());
    }

    #[test]
    fn substitution_and_primitive() {
        let (mut vs, x, y) = setup();
        let p = parse_polynomial("x*y + y^2", &mut vs).unwrap();
        let s = p.substitute(y, &parse_polynomial("1 - x", &mut vs).unwrap());
        assert_eq!(s.render(&vs), "1 - x");
        assert_eq!(p.substitute_rational(x, &rat(1, 2)).render(&vs), "y^2 + 1/2*y");
        let q = parse_polynomial("-2/3*x + 4/3", &mut vs).unwrap();
        assert_eq!(q.primitive().render(&vs), "x - 2");
        assert_eq!(q.scale(&int(3)).render(&vs), "4 - 2*x");
    }
}
