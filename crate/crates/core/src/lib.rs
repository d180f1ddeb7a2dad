//! Exact cylindrical algebraic decomposition specialised to parametric
//! Markov reward inequalities.
//!
//! The crate is `no_std` (with `alloc`) unless the `std` feature is enabled.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod arith;
pub mod cad;
pub mod markov;
pub mod poly;
pub mod projection;
pub mod simplex;

mod par;

pub use arith::{Rational, Real, RealAlgebraic, Sign};
pub use poly::{Polynomial, Var, VarKind, Vars};
