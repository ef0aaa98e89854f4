//! Non-robust allocations, a first-order adversary, and worst-case evaluation.

mod evaluate;
mod first_order;
mod payoff;

pub use evaluate::{evaluate_allocations, Candidate, ComparisonRow};
pub use first_order::{dnorm_linear_oracle, fw_adversary, spread_start, FwAdversaryTrace};
pub use payoff::PayoffTable;

use crate::error::Result;
use crate::model::{
    beta_expected_influence, beta_expected_influence_grad, influence, influence_grad_y, BudgetVector, InfluenceInstance,
};
use crate::robust::{maximize_concave, AscentOptions, AscentResult};

/// `argmax_{y in Y} I(y; x_hat)`.
pub fn solve_nominal(inst: &InfluenceInstance, cap: f64, opts: &AscentOptions) -> Result<AscentResult> {
    let x = inst.x_hat();
    maximize_concave(
        |y| Ok((influence(inst, y, &x)?, influence_grad_y(inst, y, &x)?)),
        BudgetVector::uniform(inst.num_channels(), cap),
        opts,
    )
}

/// `argmax_{y in Y} E[I(y; X)]` under the Beta posteriors.
pub fn solve_expected(inst: &InfluenceInstance, cap: f64, opts: &AscentOptions) -> Result<AscentResult> {
    maximize_concave(
        |y| {
            Ok((
                beta_expected_influence(inst, y)?,
                beta_expected_influence_grad(inst, y)?,
            ))
        },
        BudgetVector::uniform(inst.num_channels(), cap),
        opts,
    )
}
