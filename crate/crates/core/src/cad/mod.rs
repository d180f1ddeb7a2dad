//! Cylindrical algebraic decomposition: trees, lifting, decision CADs and
//! solution formulas.

mod decision;
mod formula;
mod point;
mod render;
mod system;
mod tree;

pub use decision::{decision_cad, CadOptions, DecisionCad, LevelFactors, Nullification};
pub use formula::{is_projection_definable, solution_formula, Conjunct, DefinabilityResult, SignCondition, SignedFormula};
pub use point::{roots_over, sign_at_point, LevelRoots};
pub use render::{render_bound, render_tree, RenderOptions};
pub use system::{Atom, PolySystem, Relation};
pub use tree::{Bound, CadCell, CadTree, CellKind, CellPath, LeafRef};

use crate::arith::ArithError;
use crate::poly::PolyError;
use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CadError {
    #[error("variable order is missing '{0}'")]
    OrderMissing(String),
    #[error("variable order lists '{0}' more than once")]
    OrderDuplicate(String),
    #[error("only conjunctive systems are supported")]
    NotConjunctive,
    #[error("degenerate algebraic lifting: {0}")]
    DegenerateLifting(String),
    #[error("cell limit exceeded ({0} cells)")]
    CellLimit(usize),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
