#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_alloc::{Edge, InfluenceInstance};

/// Random instance with up to `max_channels x max_customers` edges; every
/// customer keeps at least one edge.
pub fn random_instance(seed: u64, max_channels: usize, max_customers: usize) -> InfluenceInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ns = rng.random_range(1..=max_channels);
    let nt = rng.random_range(1..=max_customers);
    let mut edges = Vec::new();
    for t in 0..nt {
        let forced = rng.random_range(0..ns);
        for s in 0..ns {
            if s == forced || rng.random_bool(0.6) {
                let a = 1.0 + rng.random_range(0..40) as f64;
                let b = 1.0 + rng.random_range(0..40) as f64;
                edges.push(Edge::from_counts(s, t, a, b));
            }
        }
    }
    InfluenceInstance::new(
        (0..ns).map(|s| format!("s{s}")).collect(),
        (0..nt).map(|t| format!("t{t}")).collect(),
        edges,
    )
    .unwrap()
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Every point of the product lattice `prod_i [0, levels_i)`.
pub fn lattice(levels: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &k in levels {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..k).map(move |j| {
                    let mut q = p.clone();
                    q.push(j);
                    q
                })
            })
            .collect();
    }
    out
}
