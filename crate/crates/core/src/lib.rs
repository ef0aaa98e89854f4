//! Robust budget allocation on bipartite influence graphs.
//!
//! The adversary's problem `min_{x in X} I(y; x)` is continuous submodular in
//! `x`; [`csfm`] minimizes such functions over a box intersected with a
//! separable budget constraint, and [`robust`] wraps it in a projected
//! subgradient ascent over budgets with a certified duality gap.

// Negated comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod csfm;
pub mod error;
pub mod model;
pub mod robust;
pub mod synth;

pub use error::{Error, Result};
pub use model::{BudgetVector, Edge, InfluenceInstance, UncertaintyKind, UncertaintySet};
