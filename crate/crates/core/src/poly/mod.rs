//! Sparse multivariate polynomials over the rationals.

mod monomial;
mod parse;
mod polynomial;
mod var;

pub use monomial::Monomial;
pub use parse::parse_polynomial;
pub use polynomial::{canonical_cmp, Polynomial};
pub use var::{Var, VarInfo, VarKind, Vars};

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("the zero polynomial has no leading coefficient")]
    ZeroLeadingCoefficient,
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
}
