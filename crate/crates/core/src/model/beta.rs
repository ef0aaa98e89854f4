//! Posterior moments of the influence when each failure probability is an
//! independent Beta random variable.
//!
//! `E[X^y] = B(alpha + y, beta) / B(alpha, beta)`; all products are formed in
//! log-space.

use statrs::function::gamma::{digamma, ln_gamma};

use super::instance::InfluenceInstance;
use crate::error::Result;

/// `ln E[X^y]` for `X ~ Beta(alpha, beta)`.
pub fn log_beta_moment(alpha: f64, beta: f64, y: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    // ln B(a + y, b) - ln B(a, b); the ln Gamma(b) terms cancel.
    ln_gamma_diff(alpha, y) - ln_gamma_diff(alpha + beta, y)
}

/// `ln Gamma(a + y) - ln Gamma(a)` for `a > 0`, `y >= 0`.
///
/// For large `a` the two log-gammas nearly cancel, so the difference of their
/// Stirling series is formed directly.
pub fn ln_gamma_diff(a: f64, y: f64) -> f64 {
    if a < 10.0 {
        return ln_gamma(a + y) - ln_gamma(a);
    }
    let z = a + y;
    (a - 0.5) * (y / a).ln_1p() + y * (z.ln() - 1.0) + stirling_tail(z) - stirling_tail(a)
}

fn stirling_tail(z: f64) -> f64 {
    let r = 1.0 / z;
    let r2 = r * r;
    r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 / 1680.0)))
}

/// `d/dy ln E[X^y] = psi(alpha + y) - psi(alpha + beta + y)`.
pub fn log_beta_moment_deriv(alpha: f64, beta: f64, y: f64) -> f64 {
    digamma(alpha + y) - digamma(alpha + beta + y)
}

fn customer_log_moments(inst: &InfluenceInstance, y: &[f64], power: f64) -> Vec<f64> {
    let edges = inst.edges();
    (0..inst.num_customers())
        .map(|t| {
            inst.customer_edges(t)
                .iter()
                .map(|&k| {
                    let e = &edges[k];
                    log_beta_moment(e.alpha, e.beta, power * y[e.channel])
                })
                .sum()
        })
        .collect()
}

/// `E[I(y; X)]` under the Beta posteriors of `inst`.
pub fn beta_expected_influence(inst: &InfluenceInstance, y: &[f64]) -> Result<f64> {
    inst.check_budget_len(y)?;
    Ok(customer_log_moments(inst, y, 1.0).iter().map(|l| -l.exp_m1()).sum())
}

/// Gradient of [`beta_expected_influence`] with respect to `y`.
pub fn beta_expected_influence_grad(inst: &InfluenceInstance, y: &[f64]) -> Result<Vec<f64>> {
    inst.check_budget_len(y)?;
    let logs = customer_log_moments(inst, y, 1.0);
    let mut g = vec![0.0; inst.num_channels()];
    for e in inst.edges() {
        g[e.channel] -= logs[e.customer].exp() * log_beta_moment_deriv(e.alpha, e.beta, y[e.channel]);
    }
    Ok(g)
}

/// `Var[I(y; X)]`; customers involve disjoint edges, so per-customer variances add.
pub fn beta_variance_influence(inst: &InfluenceInstance, y: &[f64]) -> Result<f64> {
    inst.check_budget_len(y)?;
    let first = customer_log_moments(inst, y, 1.0);
    let second = customer_log_moments(inst, y, 2.0);
    Ok(first
        .iter()
        .zip(&second)
        .map(|(m1, m2)| (m2.exp() - (2.0 * m1).exp()).max(0.0))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_diff_matches_direct_form() {
        for &a in &[10.0, 12.5, 300.0, 4e4] {
            for &y in &[0.0, 0.3, 1.0, 7.5] {
                let direct = ln_gamma(a + y) - ln_gamma(a);
                let scale = ln_gamma(a + y).abs().max(1.0);
                assert!((ln_gamma_diff(a, y) - direct).abs() <= 1e-13 * scale, "a={a} y={y}");
            }
        }
        // Integer case: ln(a (a + 1)) for y = 2.
        assert!((ln_gamma_diff(1000.0, 2.0) - (1000.0f64 * 1001.0).ln()).abs() < 1e-13);
    }
    use crate::model::instance::Edge;

    fn uniform_prior(n: usize) -> InfluenceInstance {
        InfluenceInstance::new(
            (0..n).map(|i| format!("s{i}")).collect(),
            vec!["t".into()],
            (0..n).map(|s| Edge::from_counts(s, 0, 1.0, 1.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn uniform_moments() {
        let inst = uniform_prior(1);
        assert_eq!(beta_expected_influence(&inst, &[0.0]).unwrap(), 0.0);
        assert!((beta_expected_influence(&inst, &[1.0]).unwrap() - 0.5).abs() < 1e-12);
        assert!((beta_expected_influence(&inst, &[3.0]).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn gradient_of_uniform_case() {
        // d/dy (1 - 1/(1+y)) = 1/(1+y)^2
        let inst = uniform_prior(1);
        let g = beta_expected_influence_grad(&inst, &[1.0]).unwrap();
        assert!((g[0] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn concentrated_posterior_has_flat_gradient() {
        let inst = InfluenceInstance::new(
            vec!["s".into()],
            vec!["t".into()],
            vec![Edge::from_counts(0, 0, 1e9, 1.0)],
        )
        .unwrap();
        let g = beta_expected_influence_grad(&inst, &[2.0]).unwrap();
        assert!(g[0].abs() < 1e-8, "{}", g[0]);
    }

    #[test]
    fn variance_of_uniform() {
        let inst = uniform_prior(1);
        assert_eq!(beta_variance_influence(&inst, &[0.0]).unwrap(), 0.0);
        let v = beta_variance_influence(&inst, &[1.0]).unwrap();
        assert!((v - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn digamma_matches_log_gamma_differences() {
        for &x in &[1.0f64, 1.5, 3.0, 10.0, 250.0, 1e4] {
            let h = 1e-5 * x.max(1.0);
            let fd = (ln_gamma(x + h) - ln_gamma(x - h)) / (2.0 * h);
            assert!((digamma(x) - fd).abs() < 1e-6 * (1.0 + digamma(x).abs()), "x = {x}");
        }
    }

    #[test]
    fn log_gamma_matches_factorials() {
        // ln((n-1)!) accumulated exactly in log-space.
        let mut acc = 0.0f64;
        for n in 1..=2000u32 {
            let lg = ln_gamma(n as f64);
            assert!((lg - acc).abs() <= 1e-10 * acc.max(1.0), "n = {n}: {lg} vs {acc}");
            acc += (n as f64).ln();
        }
        // Stirling series at the top of the range.
        let x: f64 = 1e6;
        let stirling = (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3));
        assert!((ln_gamma(x) - stirling).abs() <= 1e-15 * stirling * 4.0);
    }
}
