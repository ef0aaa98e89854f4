//! Bipartite influence instances, uncertainty sets and influence evaluation.

mod beta;
mod influence;
mod instance;
mod uncertainty;

pub use beta::{
    beta_expected_influence, beta_expected_influence_grad, beta_variance_influence, ln_gamma_diff, log_beta_moment,
    log_beta_moment_deriv,
};
pub use influence::{customer_log_products, influence, influence_grad_x, influence_grad_y, X_FLOOR};
pub use instance::{BudgetVector, Edge, InfluenceInstance, BUDGET_SLACK};
pub use uncertainty::{UncertaintyKind, UncertaintySet};

pub(crate) use influence::log_factor;
