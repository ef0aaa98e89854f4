//! Seeded synthetic instances with Beta posteriors built from simulated
//! observations.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{param, Result};
use crate::model::{Edge, InfluenceInstance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphShape {
    /// Every channel reaches every customer.
    Complete,
    /// Each customer is reached by this many distinct random channels.
    RandomDegree(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observations {
    Fixed(u64),
    /// `n` drawn log-uniformly in `[lo, hi]` and rounded.
    LogUniform {
        lo: f64,
        hi: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub channels: usize,
    pub customers: usize,
    pub graph: GraphShape,
    pub observations: Observations,
    /// Transmission probabilities are drawn from `U[0, p_max]`.
    pub p_max: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(channels: usize, customers: usize, seed: u64) -> Self {
        SynthSpec {
            channels,
            customers,
            graph: GraphShape::Complete,
            observations: Observations::LogUniform { lo: 10.0, hi: 1e4 },
            p_max: 0.4,
            seed,
        }
    }
}

/// Returns the instance and the true per-edge failure probabilities.
pub fn gen_synthetic(spec: &SynthSpec) -> Result<(InfluenceInstance, Vec<f64>)> {
    if spec.channels == 0 || spec.customers == 0 {
        return Err(param("sizes", "channels and customers must be at least 1"));
    }
    if !(0.0..=1.0).contains(&spec.p_max) {
        return Err(param("p_max", format!("must lie in [0, 1], got {}", spec.p_max)));
    }
    if let Observations::LogUniform { lo, hi } = spec.observations {
        if !(lo >= 1.0 && hi >= lo && hi.is_finite()) {
            return Err(param("observations", format!("need 1 <= lo <= hi, got [{lo}, {hi}]")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pairs = Vec::new();
    match spec.graph {
        GraphShape::Complete => {
            for t in 0..spec.customers {
                for s in 0..spec.channels {
                    pairs.push((s, t));
                }
            }
        }
        GraphShape::RandomDegree(d) => {
            if d == 0 || d > spec.channels {
                return Err(param("degree", format!("must lie in [1, {}], got {d}", spec.channels)));
            }
            for t in 0..spec.customers {
                let mut chosen = sample(&mut rng, spec.channels, d).into_vec();
                chosen.sort_unstable();
                pairs.extend(chosen.into_iter().map(|s| (s, t)));
            }
        }
    }

    let mut edges = Vec::with_capacity(pairs.len());
    let mut truth = Vec::with_capacity(pairs.len());
    for (s, t) in pairs {
        let p: f64 = rng.random::<f64>() * spec.p_max;
        let x = 1.0 - p;
        let n = match spec.observations {
            Observations::Fixed(n) => n,
            Observations::LogUniform { lo, hi } => {
                let u: f64 = rng.random();
                (lo.ln() + u * (hi.ln() - lo.ln())).exp().round() as u64
            }
        };
        let failures = if n == 0 {
            0
        } else {
            Binomial::new(n, x)
                .map_err(|e| param("observations", e.to_string()))?
                .sample(&mut rng)
        };
        edges.push(Edge::from_counts(
            s,
            t,
            1.0 + failures as f64,
            1.0 + (n - failures) as f64,
        ));
        truth.push(x);
    }
    let channels = (0..spec.channels).map(|s| format!("s{s}")).collect();
    let customers = (0..spec.customers).map(|t| format!("t{t}")).collect();
    Ok((InfluenceInstance::new(channels, customers, edges)?, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_under_seed() {
        let spec = SynthSpec::new(6, 2, 7);
        let (a, ta) = gen_synthetic(&spec).unwrap();
        let (b, tb) = gen_synthetic(&spec).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(ta, tb);
        let (c, _) = gen_synthetic(&SynthSpec { seed: 8, ..spec }).unwrap();
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn no_observations_gives_uniform_prior() {
        let spec = SynthSpec {
            observations: Observations::Fixed(0),
            ..SynthSpec::new(3, 2, 1)
        };
        let (inst, _) = gen_synthetic(&spec).unwrap();
        assert!(inst
            .edges()
            .iter()
            .all(|e| e.alpha == 1.0 && e.beta == 1.0 && e.x_hat == 0.5));
    }

    #[test]
    fn many_observations_concentrate() {
        let spec = SynthSpec {
            observations: Observations::Fixed(1_000_000),
            ..SynthSpec::new(10, 10, 3)
        };
        let (inst, truth) = gen_synthetic(&spec).unwrap();
        let close = inst
            .edges()
            .iter()
            .zip(&truth)
            .filter(|(e, x)| (e.x_hat - **x).abs() <= 0.01)
            .count();
        assert!(close * 100 >= 95 * truth.len());
        assert!(truth.iter().all(|x| (0.6..=1.0).contains(x)));
    }

    #[test]
    fn random_degree_graph() {
        let spec = SynthSpec {
            graph: GraphShape::RandomDegree(3),
            ..SynthSpec::new(20, 50, 9)
        };
        let (inst, _) = gen_synthetic(&spec).unwrap();
        assert_eq!(inst.num_edges(), 150);
        assert!((0..50).all(|t| inst.customer_edges(t).len() == 3));
    }
}
