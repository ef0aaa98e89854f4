use crate::error::{Error, Result};

/// One channel-customer edge with its failure-probability estimate and
/// Beta posterior (`alpha` failures plus one, `beta` successes plus one).
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub channel: usize,
    pub customer: usize,
    pub x_hat: f64,
    pub alpha: f64,
    pub beta: f64,
    pub n: f64,
}

impl Edge {
    /// Builds an edge from posterior counts; the estimate is the posterior mean.
    pub fn from_counts(channel: usize, customer: usize, alpha: f64, beta: f64) -> Self {
        Edge {
            channel,
            customer,
            x_hat: alpha / (alpha + beta),
            alpha,
            beta,
            n: (alpha + beta - 2.0).max(0.0),
        }
    }

    /// Builds an edge from a failure-rate estimate and an observation count.
    /// The posterior is reconstructed as `Beta(1 + round(x_hat n), 1 + n - round(x_hat n))`
    /// while the supplied estimate is kept as `x_hat`.
    pub fn from_estimate(channel: usize, customer: usize, x_hat: f64, n: f64) -> Self {
        let failures = (x_hat * n).round();
        Edge {
            channel,
            customer,
            x_hat,
            alpha: 1.0 + failures,
            beta: 1.0 + n - failures,
            n,
        }
    }

    /// Variance of the Beta posterior on the failure probability.
    pub fn posterior_variance(&self) -> f64 {
        let s = self.alpha + self.beta;
        self.alpha * self.beta / (s * s * (s + 1.0))
    }
}

/// Bipartite influence graph between channels and customers.
///
/// Edges are stored in input order; a per-customer adjacency (CSR layout)
/// is built once at construction since every influence evaluation walks it.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceInstance {
    channels: Vec<String>,
    customers: Vec<String>,
    edges: Vec<Edge>,
    customer_offsets: Vec<usize>,
    customer_edges: Vec<usize>,
}

impl InfluenceInstance {
    pub fn new(channels: Vec<String>, customers: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidInstance("edge set is empty".into()));
        }
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for (k, e) in edges.iter().enumerate() {
            if e.channel >= channels.len() {
                return Err(Error::InvalidInstance(format!(
                    "edge {k} references channel index {} but only {} channels exist",
                    e.channel,
                    channels.len()
                )));
            }
            if e.customer >= customers.len() {
                return Err(Error::InvalidInstance(format!(
                    "edge {k} references customer index {} but only {} customers exist",
                    e.customer,
                    customers.len()
                )));
            }
            if !seen.insert((e.channel, e.customer)) {
                return Err(Error::InvalidInstance(format!(
                    "duplicate edge ({}, {})",
                    channels[e.channel], customers[e.customer]
                )));
            }
            if !(0.0..=1.0).contains(&e.x_hat) {
                return Err(Error::InvalidInstance(format!(
                    "edge {k}: x_hat = {} outside [0, 1]",
                    e.x_hat
                )));
            }
            if !(e.alpha >= 1.0 && e.beta >= 1.0 && e.alpha.is_finite() && e.beta.is_finite()) {
                return Err(Error::InvalidInstance(format!(
                    "edge {k}: posterior parameters ({}, {}) must be finite and >= 1",
                    e.alpha, e.beta
                )));
            }
            if !(e.n >= 0.0) {
                return Err(Error::InvalidInstance(format!("edge {k}: negative count {}", e.n)));
            }
        }

        let mut customer_offsets = vec![0usize; customers.len() + 1];
        for e in &edges {
            customer_offsets[e.customer + 1] += 1;
        }
        for t in 0..customers.len() {
            customer_offsets[t + 1] += customer_offsets[t];
        }
        let mut fill = customer_offsets.clone();
        let mut customer_edges = vec![0usize; edges.len()];
        for (k, e) in edges.iter().enumerate() {
            customer_edges[fill[e.customer]] = k;
            fill[e.customer] += 1;
        }

        Ok(InfluenceInstance {
            channels,
            customers,
            edges,
            customer_offsets,
            customer_edges,
        })
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn customers(&self) -> &[String] {
        &self.customers
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn num_customers(&self) -> usize {
        self.customers.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Indices of the edges incident to customer `t`.
    pub fn customer_edges(&self, t: usize) -> &[usize] {
        &self.customer_edges[self.customer_offsets[t]..self.customer_offsets[t + 1]]
    }

    pub fn x_hat(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.x_hat).collect()
    }

    pub fn posterior_variances(&self) -> Vec<f64> {
        self.edges.iter().map(Edge::posterior_variance).collect()
    }

    pub(crate) fn check_budget_len(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.channels.len() {
            return Err(Error::Dimension {
                what: "channel budgets",
                expected: self.channels.len(),
                got: y.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_edge_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.edges.len() {
            return Err(Error::Dimension {
                what: "edge values",
                expected: self.edges.len(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// A budget allocation over channels with total cap `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetVector {
    y: Vec<f64>,
    cap: f64,
}

/// Slack allowed on the cap when validating externally supplied budgets.
pub const BUDGET_SLACK: f64 = 1e-9;

impl BudgetVector {
    pub fn new(y: Vec<f64>, cap: f64) -> Result<Self> {
        if !(cap >= 0.0) || !cap.is_finite() {
            return Err(crate::error::param(
                "cap",
                format!("must be finite and >= 0, got {cap}"),
            ));
        }
        if let Some(v) = y.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(crate::error::param(
                "y",
                format!("entries must be finite and >= 0, got {v}"),
            ));
        }
        let total: f64 = y.iter().sum();
        if total > cap + BUDGET_SLACK {
            return Err(crate::error::param("y", format!("total {total} exceeds cap {cap}")));
        }
        Ok(BudgetVector { y, cap })
    }

    /// `C / |S|` on every channel.
    pub fn uniform(num_channels: usize, cap: f64) -> Self {
        let share = if num_channels == 0 {
            0.0
        } else {
            cap / num_channels as f64
        };
        BudgetVector {
            y: vec![share; num_channels],
            cap,
        }
    }

    pub(crate) fn from_projection(y: Vec<f64>, cap: f64) -> Self {
        BudgetVector { y, cap }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.y
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn total(&self) -> f64 {
        self.y.iter().sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.y
    }
}
