//! Exact rational and real-algebraic arithmetic.

mod algebraic;
mod interval;
mod isolate;
mod upoly;

pub use algebraic::{compare, rational_between, sign_at, Endpoint, Real, RealAlgebraic};
pub use interval::Interval;
pub use isolate::{isolate_real_roots, real_roots_in};
pub use upoly::UPoly;

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("polynomial is identically zero and has no isolated roots")]
    ZeroPolynomial,
    #[error("empty interval")]
    EmptyInterval,
    #[error("malformed rational '{text}' at position {position}")]
    MalformedRational { text: String, position: usize },
}

/// Sign of an exact quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(q: &Rational) -> Sign {
        if q.is_zero() {
            Sign::Zero
        } else if q.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn of_ordering(o: Ordering) -> Sign {
        match o {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Positive => "+",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Renders as `num/den`, or just `num` for integers.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

/// Parses `n`, `-n`, `n/d` or a plain decimal such as `0.25`.
///
/// On failure the error carries the 0-based byte offset of the first
/// offending character.
pub fn parse_rational(text: &str) -> Result<Rational, ArithError> {
    let err = |position: usize| ArithError::MalformedRational {
        text: text.to_string(),
        position,
    };
    let bytes = text.as_bytes();
    let mut i = 0;
    let negative = match bytes.first() {
        Some(b'-') => {
            i = 1;
            true
        }
        Some(b'+') => {
            i = 1;
            false
        }
        _ => false,
    };
    let digits = |from: usize| -> usize {
        let mut j = from;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    let int_end = digits(i);
    if int_end == i {
        return Err(err(i));
    }
    let whole: BigInt = text[i..int_end].parse().map_err(|_| err(i))?;
    let mut value = Rational::from_integer(whole);
    let mut pos = int_end;
    if pos < bytes.len() && bytes[pos] == b'.' {
        let frac_end = digits(pos + 1);
        if frac_end == pos + 1 {
            return Err(err(pos + 1));
        }
        let frac: BigInt = text[pos + 1..frac_end].parse().map_err(|_| err(pos + 1))?;
        let scale = num_traits::pow(BigInt::from(10), frac_end - pos - 1);
        value += Rational::new(frac, scale);
        pos = frac_end;
    } else if pos < bytes.len() && bytes[pos] == b'/' {
        let den_end = digits(pos + 1);
        if den_end == pos + 1 {
            return Err(err(pos + 1));
        }
        let den: BigInt = text[pos + 1..den_end].parse().map_err(|_| err(pos + 1))?;
        if den.is_zero() {
            return Err(err(pos + 1));
        }
        value /= Rational::from_integer(den);
        pos = den_end;
    }
    if pos != bytes.len() {
        return Err(err(pos));
    }
    Ok(if negative { -value } else { value })
}

/// Appends `c*mono` to a sum under construction, handling signs and unit
/// coefficients. An empty `mono` denotes the constant monomial.
pub(crate) fn push_term(out: &mut String, c: &Rational, mono: &str) {
    let negative = c.is_negative();
    let mag = c.abs();
    if out.is_empty() {
        if negative {
            out.push('-');
        }
    } else {
        out.push_str(if negative { " - " } else { " + " });
    }
    if mono.is_empty() {
        out.push_str(&mag.to_string());
    } else if mag.is_one() {
        out.push_str(mono);
    } else {
        out.push_str(&mag.to_string());
        out.push('*');
        out.push_str(mono);
    }
}

/// Power of two that is at least `q` (for `q > 0`).
pub(crate) fn pow2_at_least(q: &Rational) -> Rational {
    let mut b = Rational::one();
    while &b < q {
        b *= int(2);
    }
    b
}

/// Approximates a rational as `f64`.
pub fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}
