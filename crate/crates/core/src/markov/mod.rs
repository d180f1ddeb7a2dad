//! Markov reward processes as polynomial systems: exact reward polynomials,
//! cost-effectiveness inequalities and two-way geometry.

mod build;
mod model;
mod reward;
mod twoway;


pub use build::{build_system, encode_system, MarkovSystem, Metric, Query};
pub use model::{Entry, MarkovModel, Rewards};
pub use reward::{adjugate_identity_holds, det_adj, finite_reward_poly, infinite_reward, RewardPolys};
pub use twoway::{boundary_curve, classify_two_way, grid_compare, lattice, Boundary, GeometryClass, GridRow, TwoWay};

use crate::arith::ArithError;
use crate::poly::PolyError;
use crate::simplex::{ExtensibilityReport, SimplexError};
use alloc::boxed::Box;
use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MarkovError {
    #[error("model shape: {0}")]
    Shape(String),
    #[error("discount factor must lie in (0, 1), got {0}")]
    Lambda(String),
    #[error("row {row} of P sums to {sum}, expected 1")]
    RowSum { row: usize, sum: String },
    #[error("row {row} leaves no probability mass for its symbolic entries")]
    NoMass { row: usize },
    #[error("absorbing state {0}: {1}")]
    Absorbing(usize, String),
    #[error("transient row {0} of Q is identically zero")]
    ZeroQRow(usize),
    #[error("probability entries must be rationals or symbols, got '{0}'")]
    NotProbability(String),
    #[error("symbol '{0}' is used both as a probability and as a reward")]
    MixedRole(String),
    #[error("parameter '{0}' does not occur in the model")]
    UnknownParam(String),
    #[error("parameter '{0}' is neither free nor fixed")]
    Uncovered(String),
    #[error("free parameter '{0}' is neither a simplex coordinate nor an x-type variable")]
    Unregistered(String),
    #[error("metric {0}")]
    Metric(String),
    #[error("ICER bounds need the sign of the benefit difference")]
    IcerSign,
    #[error("two-way analysis: {0}")]
    TwoWay(String),
    #[error("built system is not simplex-extensible")]
    NotExtensible(Box<ExtensibilityReport>),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
}
