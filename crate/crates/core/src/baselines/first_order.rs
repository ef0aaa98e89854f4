//! Frank-Wolfe on the nonconvex adversary problem over a D-norm set.

use crate::error::{Error, Result};
use crate::model::{influence, influence_grad_x, InfluenceInstance, UncertaintyKind, UncertaintySet};

/// `argmin <grad, x>` over the D-norm set, as a fractional knapsack in the
/// fractions `c_e = (x_e - x_hat_e) / (u_e - x_hat_e)`.
pub fn dnorm_linear_oracle(grad: &[f64], uset: &UncertaintySet) -> Result<Vec<f64>> {
    if uset.kind() != UncertaintyKind::DNorm {
        return Err(Error::Unsupported("linear oracle is only available for D-norm sets"));
    }
    if grad.len() != uset.len() {
        return Err(Error::Dimension {
            what: "gradient entries",
            expected: uset.len(),
            got: grad.len(),
        });
    }
    let (center, hi) = (uset.center(), uset.hi());
    let coef: Vec<f64> = grad.iter().enumerate().map(|(e, g)| g * (hi[e] - center[e])).collect();
    let mut order: Vec<usize> = (0..coef.len()).filter(|&e| coef[e] < 0.0).collect();
    order.sort_by(|&a, &b| coef[a].total_cmp(&coef[b]));
    let mut x = center.to_vec();
    let mut left = uset.gamma();
    for e in order {
        if left <= 0.0 {
            break;
        }
        let c = left.min(1.0);
        x[e] = if c == 1.0 {
            hi[e]
        } else {
            center[e] + c * (hi[e] - center[e])
        };
        left -= c;
    }
    Ok(x)
}

/// The point spending the budget evenly: `c_e = min(1, gamma / |E|)`.
pub fn spread_start(uset: &UncertaintySet) -> Vec<f64> {
    let c = (uset.gamma() / uset.len() as f64).min(1.0);
    uset.center()
        .iter()
        .zip(uset.hi())
        .map(|(m, u)| m + c * (u - m))
        .collect()
}

#[derive(Debug, Clone)]
pub struct FwAdversaryTrace {
    pub x: Vec<f64>,
    /// `I(y; x)` at the start and after every step.
    pub values: Vec<f64>,
}

impl FwAdversaryTrace {
    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("trace holds the starting value")
    }
}

/// Frank-Wolfe with step `2 / (k + 2)`, `k = 1, 2, ...`, from `x0`.
pub fn fw_adversary(
    inst: &InfluenceInstance,
    y: &[f64],
    uset: &UncertaintySet,
    x0: &[f64],
    iters: usize,
) -> Result<FwAdversaryTrace> {
    let (r0, _) = uset.regularizer_eval(x0)?;
    // Points built on the budget boundary may exceed it by rounding.
    if r0 > uset.gamma() * (1.0 + 1e-12) + 1e-12 {
        return Err(crate::error::param("x0", "outside the uncertainty set"));
    }
    let mut x = x0.to_vec();
    let mut values = vec![influence(inst, y, &x)?];
    for k in 1..=iters {
        let g = influence_grad_x(inst, y, &x)?;
        let s = dnorm_linear_oracle(&g, uset)?;
        let step = 2.0 / (k as f64 + 2.0);
        for (xi, si) in x.iter_mut().zip(&s) {
            *xi += step * (si - *xi);
        }
        values.push(influence(inst, y, &x)?);
    }
    Ok(FwAdversaryTrace { x, values })
}
