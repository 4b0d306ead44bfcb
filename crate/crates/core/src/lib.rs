//! Equivalence-group machinery for first-order linear PDEs
//! `Σ A_i(X) ∂U/∂x^i = 0`: prolonged generators, determining systems,
//! differential invariants, adjoint systems and an orbit classifier.

#![allow(clippy::needless_range_loop)]

pub mod equivalence;
pub mod error;
pub mod invariants;
pub mod jet;
pub mod lie;
pub mod symbolic;

pub use equivalence::{Equation, PointTransformation};
pub use error::{Error, Result};
pub use invariants::Invariant;
pub use jet::{DiffOperator, MixedConvention};
pub use symbolic::{parse_expr, Expr, JetVar, Var};
