//! Expected influence `I(y; x) = sum_t (1 - prod_{(s,t)} x_st^y(s))` and its
//! partial derivatives.
//!
//! Products are accumulated in log-space per customer and exponentiated once.
//! `0^0 = 1`: a channel with zero budget contributes a neutral factor.

use super::instance::InfluenceInstance;
use crate::error::Result;

/// Floor applied to failure probabilities before taking logarithms.
pub const X_FLOOR: f64 = 1e-12;

#[inline]
pub(crate) fn log_factor(y: f64, x: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else {
        y * x.max(X_FLOOR).ln()
    }
}

/// Per-customer `ln prod_{(s,t)} x_st^y(s)`.
pub fn customer_log_products(inst: &InfluenceInstance, y: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    inst.check_budget_len(y)?;
    inst.check_edge_len(x)?;
    let edges = inst.edges();
    Ok((0..inst.num_customers())
        .map(|t| {
            inst.customer_edges(t)
                .iter()
                .map(|&k| log_factor(y[edges[k].channel], x[k]))
                .sum()
        })
        .collect())
}

/// Expected number of influenced customers.
pub fn influence(inst: &InfluenceInstance, y: &[f64], x: &[f64]) -> Result<f64> {
    let logs = customer_log_products(inst, y, x)?;
    Ok(logs.iter().map(|l| -l.exp_m1()).sum())
}

/// Gradient with respect to the channel budgets; every component is nonnegative.
pub fn influence_grad_y(inst: &InfluenceInstance, y: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let logs = customer_log_products(inst, y, x)?;
    let mut g = vec![0.0; inst.num_channels()];
    for (k, e) in inst.edges().iter().enumerate() {
        let lnx = x[k].max(X_FLOOR).ln();
        g[e.channel] -= lnx * logs[e.customer].exp();
    }
    Ok(g)
}

/// Gradient with respect to the per-edge failure probabilities; every
/// component is nonpositive.
pub fn influence_grad_x(inst: &InfluenceInstance, y: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let logs = customer_log_products(inst, y, x)?;
    Ok(inst
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let ys = y[e.channel];
            if ys == 0.0 {
                return 0.0;
            }
            let xk = x[k].max(X_FLOOR);
            // y x^(y-1) prod_{others} = y * prod / x
            -ys * logs[e.customer].exp() / xk
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::instance::Edge;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn single(x_hat: f64) -> InfluenceInstance {
        InfluenceInstance::new(
            vec!["s".into()],
            vec!["t".into()],
            vec![Edge {
                channel: 0,
                customer: 0,
                x_hat,
                alpha: 1.0,
                beta: 1.0,
                n: 0.0,
            }],
        )
        .unwrap()
    }

    pub(crate) fn random_instance(rng: &mut ChaCha8Rng, ns: usize, nt: usize) -> InfluenceInstance {
        let mut edges = Vec::new();
        for s in 0..ns {
            for t in 0..nt {
                if edges.is_empty() || rng.random_bool(0.7) {
                    let a = rng.random_range(1.0..20.0f64).round();
                    let b = rng.random_range(1.0..20.0f64).round();
                    edges.push(Edge::from_counts(s, t, a, b));
                }
            }
        }
        InfluenceInstance::new(
            (0..ns).map(|i| format!("s{i}")).collect(),
            (0..nt).map(|i| format!("t{i}")).collect(),
            edges,
        )
        .unwrap()
    }

    #[test]
    fn zero_budget_gives_zero() {
        let inst = single(0.3);
        assert_eq!(influence(&inst, &[0.0], &[0.3]).unwrap(), 0.0);
        assert_eq!(influence(&inst, &[0.0], &[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn small_cases() {
        let inst = single(0.5);
        assert!((influence(&inst, &[1.0], &[0.5]).unwrap() - 0.5).abs() < 1e-15);

        let two = InfluenceInstance::new(
            vec!["a".into(), "b".into()],
            vec!["t".into()],
            vec![Edge::from_counts(0, 0, 1.0, 1.0), Edge::from_counts(1, 0, 1.0, 1.0)],
        )
        .unwrap();
        assert!((influence(&two, &[1.0, 1.0], &[0.5, 0.5]).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn dimension_errors() {
        let inst = single(0.5);
        assert!(influence(&inst, &[1.0, 2.0], &[0.5]).is_err());
        assert!(influence(&inst, &[1.0], &[0.5, 0.1]).is_err());
    }

    #[test]
    fn matches_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let inst = random_instance(&mut rng, 3, 2);
        let y: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..3.0)).collect();
        let x: Vec<f64> = (0..inst.num_edges()).map(|_| rng.random_range(0.2..0.95)).collect();
        let exact = influence(&inst, &y, &x).unwrap();

        // Integer part of y(s) gives independent attempts; the fractional part
        // is one extra attempt with failure probability x^frac.
        let samples = 1_000_000;
        let mut total = 0u64;
        for _ in 0..samples {
            for t in 0..inst.num_customers() {
                let mut influenced = false;
                for &k in inst.customer_edges(t) {
                    let ys = y[inst.edges()[k].channel];
                    let whole = ys.floor() as usize;
                    for _ in 0..whole {
                        if rng.random::<f64>() >= x[k] {
                            influenced = true;
                        }
                    }
                    if rng.random::<f64>() >= x[k].powf(ys - ys.floor()) {
                        influenced = true;
                    }
                }
                total += influenced as u64;
            }
        }
        let mean = total as f64 / samples as f64;
        // Per-sample variance is bounded by |T|^2 / 4.
        let se = (inst.num_customers() as f64).powi(2) / 4.0 / samples as f64;
        assert!((mean - exact).abs() <= 3.0 * se.sqrt(), "mc {mean} exact {exact}");
    }

    #[test]
    fn grad_y_cases() {
        let inst = single(1.0);
        assert_eq!(influence_grad_y(&inst, &[2.0], &[1.0]).unwrap(), vec![0.0]);
        let inst = single(0.5);
        let g = influence_grad_y(&inst, &[1.0], &[0.5]).unwrap();
        let h = 1e-6;
        let fd =
            (influence(&inst, &[1.0 + h], &[0.5]).unwrap() - influence(&inst, &[1.0 - h], &[0.5]).unwrap()) / (2.0 * h);
        assert!((g[0] - fd).abs() < 1e-8);
        assert!((g[0] - 0.346_573_590_279_972_6).abs() < 1e-12);
    }

    #[test]
    fn grad_x_cases() {
        let inst = single(0.5);
        assert_eq!(influence_grad_x(&inst, &[0.0], &[0.5]).unwrap(), vec![0.0]);
        let g = influence_grad_x(&inst, &[2.0], &[0.5]).unwrap();
        assert!((g[0] + 1.0).abs() < 1e-12);
    }
}
