use super::algebraic::{Real, RealAlgebraic};
use super::{int, pow2_at_least, ArithError, Rational, Sign, UPoly};
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Number of sign variations bounding the roots of `p` in the open interval
/// `(a, b)` (Descartes' rule after mapping the interval onto `(0, inf)`).
pub(crate) fn descartes_count(p: &UPoly, a: &Rational, b: &Rational) -> usize {
    let t = p.compose_affine(a, &(b - a));
    t.reverse().shift_one().sign_variations()
}

/// Isolates every real root of a nonzero polynomial, in increasing order.
///
/// Rational roots come back as [`Real::Rational`]; irrational ones carry a
/// square-free defining polynomial and an isolating interval.
pub fn isolate_real_roots(p: &UPoly) -> Result<Vec<Real>, ArithError> {
    if p.is_zero() {
        return Err(ArithError::ZeroPolynomial);
    }
    let s = p.square_free();
    match s.degree() {
        Some(0) => return Ok(Vec::new()),
        Some(1) => return Ok(alloc::vec![Real::Rational(-s.coeff(0) / s.coeff(1))]),
        _ => {}
    }
    let b = pow2_at_least(&s.cauchy_bound());
    let mut out = Vec::new();
    bisect(&s, -b.clone(), b, &mut out);
    Ok(out
        .into_iter()
        .map(|r| match r {
            Found::Exact(q) => Real::Rational(q),
            Found::Isolated(lo, hi) => match demote_rational(&s, lo.clone(), hi.clone()) {
                Some(q) => Real::Rational(q),
                None => Real::Algebraic(RealAlgebraic::from_isolated(s.clone(), lo, hi)),
            },
        })
        .collect())
}

/// Real roots of `p` strictly between `lo` and `hi`.
pub fn real_roots_in(p: &UPoly, lo: &Rational, hi: &Rational) -> Result<Vec<Real>, ArithError> {
    let lo_r = Real::Rational(lo.clone());
    let hi_r = Real::Rational(hi.clone());
    Ok(isolate_real_roots(p)?
        .into_iter()
        .filter(|r| super::compare(r, &lo_r).is_gt() && super::compare(r, &hi_r).is_lt())
        .collect())
}

enum Found {
    Exact(Rational),
    Isolated(Rational, Rational),
}

fn bisect(p: &UPoly, a: Rational, b: Rational, out: &mut Vec<Found>) {
    match descartes_count(p, &a, &b) {
        0 => {}
        1 => out.push(Found::Isolated(a, b)),
        _ => {
            let m = (&a + &b) / int(2);
            bisect(p, a, m.clone(), out);
            if p.eval(&m).is_zero() {
                out.push(Found::Exact(m.clone()));
            }
            bisect(p, m, b, out);
        }
    }
}

/// Detects a rational root inside an isolating interval of the primitive
/// square-free `p`. A rational root has denominator dividing the leading
/// coefficient, so once the interval is narrower than `1/lc^2` the simplest
/// rational inside it is the only candidate.
fn demote_rational(p: &UPoly, mut lo: Rational, mut hi: Rational) -> Option<Rational> {
    let lc: BigInt = p.lc().abs().to_integer();
    let limit = Rational::new(BigInt::one(), &lc * &lc);
    let lo_sign = p.sign_at_rational(&lo);
    while &hi - &lo >= limit {
        let m = (&lo + &hi) / int(2);
        match p.sign_at_rational(&m) {
            Sign::Zero => return Some(m),
            s if s == lo_sign => lo = m,
            _ => hi = m,
        }
    }
    let r = simplest_between(&lo, Some(&hi));
    if p.eval(&r).is_zero() {
        Some(r)
    } else {
        None
    }
}

/// Rational with the smallest denominator in the open interval `(lo, hi)`;
/// `hi = None` means `+inf`.
pub(crate) fn simplest_between(lo: &Rational, hi: Option<&Rational>) -> Rational {
    let zero = Rational::zero();
    match hi {
        None => {
            if lo.is_negative() {
                return zero;
            }
            lo.floor() + Rational::one()
        }
        Some(hi) => {
            debug_assert!(lo < hi);
            if lo.is_negative() && hi.is_positive() {
                return zero;
            }
            if !hi.is_positive() {
                return -simplest_between(&-hi.clone(), Some(&-lo.clone()));
            }
            let fl = lo.floor();
            let next = &fl + Rational::one();
            if &next < hi {
                return next;
            }
            // lo and hi share the unit segment [fl, fl + 1]
            let lo_frac = lo - &fl;
            let hi_frac = hi - &fl;
            let inner_lo = Rational::one() / hi_frac;
            let inner = if lo_frac.is_zero() {
                simplest_between(&inner_lo, None)
            } else {
                simplest_between(&inner_lo, Some(&(Rational::one() / lo_frac)))
            };
            fl + Rational::one() / inner
        }
    }
}
