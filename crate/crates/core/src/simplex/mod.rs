//! Structured CADs for simplex-constrained systems: simplex and IFR CADs,
//! simplex-extensibility checks, the specialised lifting over x-type
//! variables and a 3-SAT encoder.

mod extensible;
mod sat;
mod specialized;
mod system;
mod trees;

pub use extensible::{check_simplex_extensible, CertMethod, CheckOptions, ExtensibilityReport, FCheck, GVerdict, Witness};
pub use sat::{encode_3sat, Clause, Literal};
pub use specialized::{specialized_cad, SpecializedCad, SpecializedOptions};
pub use system::{Decomposition, SimplexConstraint, SimplexSpec, SystemM, XTerm, XVar};
pub use trees::{glue_simplices, ifr_cad, simplex_cad, simplex_system_cad};

use crate::cad::CadError;
use alloc::string::String;
use num_bigint::BigUint;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimplexError {
    #[error("simplex bound kappa = {0} must lie in (0, 1]")]
    KappaOutOfRange(String),
    #[error("simplex {0} has no variables")]
    EmptySimplex(usize),
    #[error("variable '{0}' belongs to more than one simplex")]
    SharedVariable(String),
    #[error("unsupported f* shape: {0}")]
    UnsupportedShape(String),
    #[error("IFR requires {0}")]
    IfrShape(String),
    #[error("clause {0} has {1} literals; every clause needs exactly 3")]
    ClauseArity(usize, usize),
    #[error("literal refers to variable {0}, but the formula has {1} variables")]
    LiteralRange(usize, usize),
    #[error("x-level lifting not supported: {0}")]
    Lifting(String),
    #[error("system is not simplex-extensible")]
    NotExtensible(alloc::boxed::Box<ExtensibilityReport>),
    #[error(transparent)]
    Cad(#[from] CadError),
}

/// `3^(sum of simplex sizes) * 4^(number of x-type variables)`.
pub fn cell_count_bound(system: &SystemM) -> BigUint {
    let tau: u32 = system.simplices.iter().map(|s| s.vars.len() as u32).sum();
    BigUint::from(3u32).pow(tau) * BigUint::from(4u32).pow(system.x_vars.len() as u32)
}
