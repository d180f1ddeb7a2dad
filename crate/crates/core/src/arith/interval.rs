use super::{Rational, Sign};
use num_traits::{One, Signed, Zero};

/// Closed rational interval `[lo, hi]` used for enclosure arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Interval {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(q: Rational) -> Interval {
        Interval { lo: q.clone(), hi: q }
    }

    pub fn one() -> Interval {
        Interval::point(Rational::one())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for v in &c[1..] {
            if v < &lo {
                lo = v.clone();
            }
            if v > &hi {
                hi = v.clone();
            }
        }
        Interval::new(lo, hi)
    }

    pub fn scale(&self, s: &Rational) -> Interval {
        let a = &self.lo * s;
        let b = &self.hi * s;
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    pub fn pow(&self, e: u32) -> Interval {
        let mut out = Interval::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        if e.is_multiple_of(2) && out.lo.is_negative() {
            // even powers are nonnegative
            out.lo = Rational::zero();
        }
        out
    }

    /// Sign of every point of the interval, when uniform and nonzero.
    pub fn strict_sign(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Positive)
        } else if self.hi.is_negative() {
            Some(Sign::Negative)
        } else {
            None
        }
    }

    /// Whether the interval lies strictly within `(-b, b)`.
    pub fn within(&self, b: &Rational) -> bool {
        self.lo > -b.clone() && &self.hi < b
    }
}
