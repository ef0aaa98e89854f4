//! The adversary's problem `min_{x in X} I(y; x)` as a constrained
//! submodular minimization over per-edge failure probabilities.

use crate::csfm::{constrained_min, CsfmCertificate, CsfmOptions, GreedyChain, RhoProfile, SubmodularObjective};
use crate::error::Result;
use crate::model::{influence, log_factor, InfluenceInstance, UncertaintySet, X_FLOOR};

/// `x -> I(y; x)` for a fixed budget, with one coordinate per edge.
pub struct AdversaryObjective<'a> {
    inst: &'a InfluenceInstance,
    y: &'a [f64],
}

impl<'a> AdversaryObjective<'a> {
    pub fn new(inst: &'a InfluenceInstance, y: &'a [f64]) -> Result<Self> {
        inst.check_budget_len(y)?;
        Ok(AdversaryObjective { inst, y })
    }
}

/// Greedy chain that keeps per-customer log products and updates one factor
/// per step.
pub struct AdversaryChain<'a> {
    obj: &'a AdversaryObjective<'a>,
    edge_log: Vec<f64>,
    customer_log: Vec<f64>,
    value: f64,
}

impl GreedyChain for AdversaryChain<'_> {
    fn value(&self) -> f64 {
        self.value
    }

    fn advance(&mut self, i: usize, to: f64) -> f64 {
        let e = &self.obj.inst.edges()[i];
        let new_log = log_factor(self.obj.y[e.channel], to);
        let old_log = std::mem::replace(&mut self.edge_log[i], new_log);
        if new_log != old_log {
            let t = e.customer;
            let before = self.customer_log[t];
            let after = before + (new_log - old_log);
            self.customer_log[t] = after;
            // (1 - e^after) - (1 - e^before), written to keep precision when
            // both products are close to one.
            self.value += before.exp() * -(after - before).exp_m1();
        }
        self.value
    }
}

impl<'a> SubmodularObjective for AdversaryObjective<'a> {
    type Chain<'b>
        = AdversaryChain<'b>
    where
        Self: 'b;

    fn dim(&self) -> usize {
        self.inst.num_edges()
    }

    fn value(&self, x: &[f64]) -> f64 {
        influence(self.inst, self.y, x).expect("dimensions checked at construction")
    }

    fn chain(&self, start: &[f64]) -> AdversaryChain<'_> {
        let edges = self.inst.edges();
        let edge_log: Vec<f64> = edges
            .iter()
            .zip(start)
            .map(|(e, &x)| log_factor(self.y[e.channel], x))
            .collect();
        let mut customer_log = vec![0.0; self.inst.num_customers()];
        for (e, l) in edges.iter().zip(&edge_log) {
            customer_log[e.customer] += l;
        }
        let value = customer_log.iter().map(|l| -l.exp_m1()).sum();
        AdversaryChain {
            obj: self,
            edge_log,
            customer_log,
            value,
        }
    }

    /// `sum_e y_s max(1, lo_e^(y_s - 1))`, bounding `|dI/dx_e|` on the box.
    fn linf_lipschitz(&self, lo: &[f64], _hi: &[f64]) -> f64 {
        self.inst
            .edges()
            .iter()
            .zip(lo)
            .map(|(e, &l)| {
                let ys = self.y[e.channel];
                if ys == 0.0 {
                    0.0
                } else {
                    ys * l.max(X_FLOOR).powf(ys - 1.0).max(1.0)
                }
            })
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct AdversaryResponse {
    pub x_worst: Vec<f64>,
    /// `I(y; x_worst)`.
    pub value: f64,
    pub regularizer: f64,
    pub certificate: CsfmCertificate,
    pub rho: RhoProfile,
}

impl AdversaryResponse {
    /// Certified lower bound on `min_{x in X} I(y; x)` over the grid.
    pub fn lower_bound(&self) -> f64 {
        self.certificate.dual_lower_bound
    }
}

/// Worst-case failure probabilities for budget `y` over the set `uset`.
pub fn adversary_best_response(
    inst: &InfluenceInstance,
    uset: &UncertaintySet,
    y: &[f64],
    opts: &CsfmOptions,
    warm_start: Option<&RhoProfile>,
) -> Result<AdversaryResponse> {
    let obj = AdversaryObjective::new(inst, y)?;
    inst.check_edge_len(uset.center())?;
    let sol = constrained_min(&obj, uset, uset.gamma(), uset.lo(), uset.hi(), opts, warm_start)?;
    Ok(AdversaryResponse {
        x_worst: sol.x,
        value: sol.value,
        regularizer: sol.regularizer,
        certificate: sol.certificate,
        rho: sol.rho,
    })
}
