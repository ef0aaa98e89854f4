//! Projected gradient ascent for concave objectives over the budget set.

use super::projection::project_budget;
use crate::error::{param, Error, Result};
use crate::model::{influence, influence_grad_y, BudgetVector, InfluenceInstance};

#[derive(Debug, Clone)]
pub struct AscentOptions {
    /// Target for the certified gap `max_z <g, z - y>`.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            tol: 1e-6,
            max_iters: 20_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AscentResult {
    pub y: BudgetVector,
    pub value: f64,
    /// `value + gap`; an upper bound on the maximum by concavity.
    pub upper_bound: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Linear-maximization gap `max_{z in Y} <g, z - y>` over `{z >= 0, sum z <= cap}`.
pub fn budget_fw_gap(g: &[f64], y: &[f64], cap: f64) -> f64 {
    let gmax = g.iter().copied().fold(0.0, f64::max);
    let inner: f64 = g.iter().zip(y).map(|(a, b)| a * b).sum();
    (cap * gmax - inner).max(0.0)
}

/// Maximizes a concave `f` over `{y >= 0, sum y <= cap}`.
///
/// `eval` returns the value and gradient. Steps are backtracked until the
/// quadratic upper model holds; the step grows again after each accepted move.
pub fn maximize_concave<F>(mut eval: F, y0: BudgetVector, opts: &AscentOptions) -> Result<AscentResult>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    if !(opts.tol > 0.0) {
        return Err(param("tol", format!("must be positive, got {}", opts.tol)));
    }
    let cap = y0.cap();
    let mut y = y0;
    let (mut fy, mut g) = eval(y.as_slice())?;
    let mut gap = budget_fw_gap(&g, y.as_slice(), cap);
    // Every iterate certifies `f(y) + gap(y)` as an upper bound, so the best
    // value and the best bound are tracked separately.
    let mut best_y = y.clone();
    let mut best_value = fy;
    let mut upper_bound = fy + gap;
    let mut step = 1.0;
    let mut iterations = 0;
    while upper_bound - best_value > opts.tol && iterations < opts.max_iters {
        iterations += 1;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = y.as_slice().iter().zip(&g).map(|(a, b)| a + step * b).collect();
            let cand = project_budget(&trial, cap)?;
            let mut lin = 0.0;
            let mut sq = 0.0;
            for ((c, a), b) in cand.as_slice().iter().zip(y.as_slice()).zip(&g) {
                lin += b * (c - a);
                sq += (c - a) * (c - a);
            }
            if sq == 0.0 {
                break;
            }
            let (fc, gc) = eval(cand.as_slice())?;
            if fc >= fy + lin - sq / (2.0 * step) - 1e-15 * fy.abs() {
                y = cand;
                fy = fc;
                g = gc;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        step *= 2.0;
        gap = budget_fw_gap(&g, y.as_slice(), cap);
        upper_bound = upper_bound.min(fy + gap);
        if fy > best_value {
            best_value = fy;
            best_y = y.clone();
        }
    }
    let gap = (upper_bound - best_value).max(0.0);
    Ok(AscentResult {
        y: best_y,
        value: best_value,
        upper_bound: upper_bound.max(best_value),
        gap,
        iterations,
        converged: gap <= opts.tol,
    })
}

/// `max_{y in Y} I(y; x)` with a certified upper bound.
pub fn max_influence_given_x(
    inst: &InfluenceInstance,
    x: &[f64],
    cap: f64,
    y0: Option<BudgetVector>,
    opts: &AscentOptions,
) -> Result<AscentResult> {
    let y0 = y0.unwrap_or_else(|| BudgetVector::uniform(inst.num_channels(), cap));
    maximize_concave(
        |y| Ok((influence(inst, y, x)?, influence_grad_y(inst, y, x)?)),
        y0,
        opts,
    )
}

/// `max_{y in Y} sum_k mu_k I(y; x_k)` with a certified upper bound, for
/// nonnegative `weights` that are normalized here.
///
/// For any mixture of adversary responses this bounds the robust optimum from
/// above: `min_x I(y; x) <= sum_k mu_k I(y; x_k)` for every `y`.
pub fn max_mixture_influence(
    inst: &InfluenceInstance,
    weights: &[f64],
    xs: &[Vec<f64>],
    cap: f64,
    y0: Option<BudgetVector>,
    opts: &AscentOptions,
) -> Result<AscentResult> {
    if weights.len() != xs.len() || xs.is_empty() {
        return Err(param(
            "mixture",
            format!("{} weights for {} responses", weights.len(), xs.len()),
        ));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
        return Err(param("mixture", format!("weights must be finite and >= 0, got {w}")));
    }
    let total: f64 = weights.iter().sum();
    let mu: Vec<f64> = if total > 0.0 {
        weights.iter().map(|w| w / total).collect()
    } else {
        vec![1.0 / xs.len() as f64; xs.len()]
    };
    if let Some(x) = xs.iter().find(|x| x.len() != inst.num_edges()) {
        return Err(Error::Dimension {
            what: "failure probabilities",
            expected: inst.num_edges(),
            got: x.len(),
        });
    }
    let y0 = y0.unwrap_or_else(|| BudgetVector::uniform(inst.num_channels(), cap));
    maximize_concave(
        |y| {
            let mut value = 0.0;
            let mut grad = vec![0.0; y.len()];
            for (m, x) in mu.iter().zip(xs).filter(|(m, _)| **m > 0.0) {
                value += m * influence(inst, y, x)?;
                for (g, d) in grad.iter_mut().zip(influence_grad_y(inst, y, x)?) {
                    *g += m * d;
                }
            }
            Ok((value, grad))
        },
        y0,
        opts,
    )
}
