//! Fixtures shared by the benchmarks.

use robust_alloc::synth::{gen_synthetic, GraphShape, SynthSpec};
use robust_alloc::InfluenceInstance;

/// Synthetic instance; `degree = None` gives a complete bipartite graph.
pub fn instance(channels: usize, customers: usize, degree: Option<usize>, seed: u64) -> InfluenceInstance {
    let spec = SynthSpec {
        graph: degree.map_or(GraphShape::Complete, GraphShape::RandomDegree),
        ..SynthSpec::new(channels, customers, seed)
    };
    gen_synthetic(&spec).expect("valid synthetic spec").0
}

/// Deterministic pseudo-random values in `[-1, 1)`.
pub fn noise(len: usize, seed: u64) -> Vec<f64> {
    let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    (0..len)
        .map(|_| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 52) as f64 - 1.0
        })
        .collect()
}
