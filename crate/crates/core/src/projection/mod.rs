//! Subresultant coefficients and the Hong projection operator.

mod hong;
mod matrix;
mod subresultant;

pub use hong::{
    hong_projection, normalize_factors, shortcut_project, FactorOrigin, ProjectionFactorSet,
    ProjectionInput, RawFactor,
};
pub use matrix::{det, det_bareiss, det_cofactor, PolyMatrix};
pub use subresultant::{psc, psc_set, resultant, sylvester_habicht};

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProjectionError {
    #[error("sylvester-habicht matrix requires deg f >= deg g (got {p} < {q})")]
    DegreeOrder { p: u32, q: u32 },
    #[error("sylvester-habicht index {i} out of range for degrees ({p}, {q})")]
    IndexOutOfRange { i: u32, p: u32, q: u32 },
    #[error("sylvester-habicht matrix of a zero polynomial")]
    ZeroPolynomial,
    #[error("not a shortcut case: {0}")]
    NotShortcut(String),
}
