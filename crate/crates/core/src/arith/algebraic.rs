use super::isolate::{descartes_count, isolate_real_roots};
use super::{int, rational_to_f64, ArithError, Interval, Rational, Sign, UPoly};
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use num_traits::Zero;

/// Bisections attempted before falling back to an exact gcd test.
const REFINE_CAP: usize = 64;

/// Irrational real algebraic number: the unique root of a square-free
/// primitive polynomial inside an open rational interval.
///
/// Rational roots are never represented this way; constructors demote them
/// to [`Real::Rational`].
#[derive(Debug, Clone)]
pub struct RealAlgebraic {
    poly: UPoly,
    lo: Rational,
    hi: Rational,
}

impl RealAlgebraic {
    pub(crate) fn from_isolated(poly: UPoly, lo: Rational, hi: Rational) -> RealAlgebraic {
        RealAlgebraic { poly, lo, hi }
    }

    /// Validates that `(lo, hi)` isolates exactly one root of `poly`,
    /// returning it as a rational when it is one.
    pub fn try_new(poly: &UPoly, lo: Rational, hi: Rational) -> Result<Real, ArithError> {
        if lo >= hi {
            return Err(ArithError::EmptyInterval);
        }
        let s = poly.square_free();
        if s.eval(&lo).is_zero() || s.eval(&hi).is_zero() {
            return Err(ArithError::EmptyInterval);
        }
        let lo_r = Real::Rational(lo.clone());
        let hi_r = Real::Rational(hi.clone());
        let inside: alloc::vec::Vec<Real> = isolate_real_roots(&s)?
            .into_iter()
            .filter(|r| compare(r, &lo_r).is_gt() && compare(r, &hi_r).is_lt())
            .collect();
        match inside.as_slice() {
            [Real::Rational(q)] => Ok(Real::Rational(q.clone())),
            [Real::Algebraic(_)] => {
                // keep the caller's polynomial when it is already square-free
                let poly = if s.degree() == poly.degree() { poly.clone() } else { s };
                Ok(Real::Algebraic(RealAlgebraic { poly, lo, hi }))
            }
            _ => Err(ArithError::EmptyInterval),
        }
    }

    pub fn poly(&self) -> &UPoly {
        &self.poly
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn enclosure(&self) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone())
    }

    /// Halves the isolating interval.
    pub fn refine(&mut self) {
        let m = (&self.lo + &self.hi) / int(2);
        let sm = self.poly.sign_at_rational(&m);
        debug_assert!(sm != Sign::Zero, "normalised algebraic number hit a rational root");
        if sm == self.poly.sign_at_rational(&self.lo) {
            self.lo = m;
        } else {
            self.hi = m;
        }
    }

    pub fn refine_below(&mut self, width: &Rational) {
        while &(&self.hi - &self.lo) >= width {
            self.refine();
        }
    }
}

/// An exact real number: rational or real algebraic.
#[derive(Debug, Clone)]
pub enum Real {
    Rational(Rational),
    Algebraic(RealAlgebraic),
}

impl Real {
    pub fn zero() -> Real {
        Real::Rational(Rational::zero())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Real::Rational(q) => Some(q),
            Real::Algebraic(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Real::Rational(_))
    }

    /// Rational lower bound (the value itself when rational).
    pub fn lower(&self) -> Rational {
        match self {
            Real::Rational(q) => q.clone(),
            Real::Algebraic(a) => a.lo.clone(),
        }
    }

    /// Rational upper bound (the value itself when rational).
    pub fn upper(&self) -> Rational {
        match self {
            Real::Rational(q) => q.clone(),
            Real::Algebraic(a) => a.hi.clone(),
        }
    }

    pub fn enclosure(&self) -> Interval {
        match self {
            Real::Rational(q) => Interval::point(q.clone()),
            Real::Algebraic(a) => a.enclosure(),
        }
    }

    pub fn refine(&mut self) {
        if let Real::Algebraic(a) = self {
            a.refine();
        }
    }

    /// Approximate value; accurate to far better than `f64` precision.
    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Rational(q) => rational_to_f64(q),
            Real::Algebraic(a) => {
                let mut a = a.clone();
                let scale = a.hi.clone() - a.lo.clone();
                let tiny = scale * Rational::new(1.into(), num_bigint::BigInt::from(1u64 << 60));
                a.refine_below(&tiny);
                rational_to_f64(&((&a.lo + &a.hi) / int(2)))
            }
        }
    }

    /// Human-readable rendering: `num/den`, or `root(t^2 - 2 in (1, 2))`.
    pub fn render(&self) -> String {
        use alloc::format;
        match self {
            Real::Rational(q) => format!("{q}"),
            Real::Algebraic(a) => format!("root({} in ({}, {}))", a.poly.render("t"), a.lo, a.hi),
        }
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        compare(self, other) == Ordering::Equal
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn cmp_alg_rational(a: &RealAlgebraic, q: &Rational) -> Ordering {
    if q <= &a.lo {
        return Ordering::Greater;
    }
    if q >= &a.hi {
        return Ordering::Less;
    }
    match a.poly.sign_at_rational(q) {
        Sign::Zero => Ordering::Equal,
        s if s == a.poly.sign_at_rational(&a.lo) => Ordering::Greater,
        _ => Ordering::Less,
    }
}

/// Exact comparison of two reals.
pub fn compare(a: &Real, b: &Real) -> Ordering {
    match (a, b) {
        (Real::Rational(x), Real::Rational(y)) => x.cmp(y),
        (Real::Algebraic(x), Real::Rational(y)) => cmp_alg_rational(x, y),
        (Real::Rational(x), Real::Algebraic(y)) => cmp_alg_rational(y, x).reverse(),
        (Real::Algebraic(x), Real::Algebraic(y)) => cmp_alg_alg(x.clone(), y.clone()),
    }
}

fn cmp_alg_alg(mut a: RealAlgebraic, mut b: RealAlgebraic) -> Ordering {
    let disjoint = |a: &RealAlgebraic, b: &RealAlgebraic| {
        if a.hi <= b.lo {
            Some(Ordering::Less)
        } else if b.hi <= a.lo {
            Some(Ordering::Greater)
        } else {
            None
        }
    };
    for _ in 0..REFINE_CAP {
        if let Some(o) = disjoint(&a, &b) {
            return o;
        }
        a.refine();
        b.refine();
    }
    // Either equal or very close: decide equality through the common factor.
    let g = a.poly.gcd(&b.poly);
    if g.degree().unwrap_or(0) > 0 {
        let l = if a.lo > b.lo { a.lo.clone() } else { b.lo.clone() };
        let h = if a.hi < b.hi { a.hi.clone() } else { b.hi.clone() };
        if l < h && g.sign_at_rational(&l).times(g.sign_at_rational(&h)) == Sign::Negative {
            return Ordering::Equal;
        }
    }
    loop {
        if let Some(o) = disjoint(&a, &b) {
            return o;
        }
        a.refine();
        b.refine();
    }
}

/// Sign of `p` at an exact real point.
pub fn sign_at(p: &UPoly, x: &Real) -> Sign {
    let a = match x {
        Real::Rational(q) => return p.sign_at_rational(q),
        Real::Algebraic(a) => a,
    };
    if p.is_zero() {
        return Sign::Zero;
    }
    let mut a = a.clone();
    let settle = |a: &RealAlgebraic| -> Option<Sign> {
        if descartes_count(p, &a.lo, &a.hi) == 0 {
            Some(p.sign_at_rational(&((&a.lo + &a.hi) / int(2))))
        } else {
            None
        }
    };
    for _ in 0..REFINE_CAP {
        if let Some(s) = settle(&a) {
            return s;
        }
        a.refine();
    }
    let g = p.gcd(&a.poly);
    if g.degree().unwrap_or(0) > 0
        && g.sign_at_rational(&a.lo).times(g.sign_at_rational(&a.hi)) == Sign::Negative
    {
        return Sign::Zero;
    }
    loop {
        if let Some(s) = settle(&a) {
            return s;
        }
        a.refine();
    }
}

/// End of an interval on the real line.
#[derive(Debug, Clone)]
pub enum Endpoint {
    NegInf,
    Finite(Real),
    PosInf,
}

/// A rational strictly inside the open interval `(lo, hi)`.
///
/// Half-lines use one unit past the rationalised finite end; bounded
/// intervals use the midpoint of the separating gap.
pub fn rational_between(lo: &Endpoint, hi: &Endpoint) -> Result<Rational, ArithError> {
    let one = Rational::from_integer(1.into());
    match (lo, hi) {
        (Endpoint::NegInf, Endpoint::PosInf) => Ok(Rational::zero()),
        (Endpoint::NegInf, Endpoint::Finite(r)) => Ok(r.lower() - one),
        (Endpoint::Finite(r), Endpoint::PosInf) => Ok(r.upper() + one),
        (Endpoint::Finite(a), Endpoint::Finite(b)) => {
            if compare(a, b) != Ordering::Less {
                return Err(ArithError::EmptyInterval);
            }
            let mut a = a.clone();
            let mut b = b.clone();
            loop {
                let ua = a.upper();
                let lb = b.lower();
                if ua < lb {
                    return Ok((ua + lb) / int(2));
                }
                a.refine();
                b.refine();
            }
        }
        _ => Err(ArithError::EmptyInterval),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn sqrt(n: i64) -> Real {
        let roots = isolate_real_roots(&UPoly::from_ints(&[-n, 0, 1])).unwrap();
        roots[1].clone()
    }

    #[test]
    fn compares_distinct_representations() {
        let a = sqrt(2);
        // sqrt 2 also as a root of x^4 - 4 with a different interval
        let b = isolate_real_roots(&UPoly::from_ints(&[-4, 0, 0, 0, 1])).unwrap()[1].clone();
        assert_eq!(compare(&a, &b), Ordering::Equal);
        assert_eq!(compare(&a, &sqrt(3)), Ordering::Less);
        assert_eq!(compare(&Real::Rational(rat(7, 5)), &a), Ordering::Less);
        assert_eq!(compare(&Real::Rational(rat(3, 2)), &a), Ordering::Greater);
    }

    #[test]
    fn signs_at_algebraic_points() {
        let a = sqrt(2);
        assert_eq!(sign_at(&UPoly::from_ints(&[-2, 0, 1]), &a), Sign::Zero);
        assert_eq!(sign_at(&UPoly::from_ints(&[-3, 0, 1]), &a), Sign::Negative);
        assert_eq!(sign_at(&UPoly::from_ints(&[-1, 1]), &a), Sign::Positive);
    }

    #[test]
    fn samples_between() {
        let s3 = sqrt(3);
        let neg = match isolate_real_roots(&UPoly::from_ints(&[-3, 0, 1])).unwrap().remove(0) {
            r => r,
        };
        let m = rational_between(&Endpoint::Finite(neg), &Endpoint::Finite(s3.clone())).unwrap();
        assert_eq!(m, rat(0, 1));
        let q = rational_between(&Endpoint::Finite(s3), &Endpoint::PosInf).unwrap();
        assert!(q > rat(2, 1));
        assert_eq!(
            rational_between(&Endpoint::Finite(Real::Rational(rat(1, 1))), &Endpoint::PosInf).unwrap(),
            rat(2, 1)
        );
        assert_eq!(
            rational_between(&Endpoint::Finite(Real::Rational(rat(1, 1))), &Endpoint::Finite(Real::Rational(rat(1, 1)))),
            Err(ArithError::EmptyInterval)
        );
    }

    #[test]
    fn try_new_demotes_rational() {
        let p = UPoly::from_ints(&[-1, 3]);
        let r = RealAlgebraic::try_new(&p, rat(0, 1), rat(1, 1)).unwrap();
        assert_eq!(r, Real::Rational(rat(1, 3)));
        let p = UPoly::from_ints(&[-2, 0, 1]);
        assert!(matches!(RealAlgebraic::try_new(&p, rat(1, 1), rat(2, 1)).unwrap(), Real::Algebraic(_)));
        assert!(RealAlgebraic::try_new(&p, rat(-2, 1), rat(2, 1)).is_err());
    }
}
