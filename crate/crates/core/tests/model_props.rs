mod common;

use common::{random_instance, uniform_vec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use robust_alloc::model::{beta_expected_influence, influence, influence_grad_x, influence_grad_y};

fn setup(seed: u64) -> (robust_alloc::InfluenceInstance, ChaCha8Rng) {
    (random_instance(seed, 4, 3), ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lattice_submodular_in_x(seed in any::<u64>()) {
        let (inst, mut rng) = setup(seed);
        let y = uniform_vec(&mut rng, inst.num_channels(), 0.0, 3.0);
        let a = uniform_vec(&mut rng, inst.num_edges(), 0.0, 1.0);
        let b = uniform_vec(&mut rng, inst.num_edges(), 0.0, 1.0);
        let join: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p.max(*q)).collect();
        let meet: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p.min(*q)).collect();
        let i = |x: &[f64]| influence(&inst, &y, x).unwrap();
        prop_assert!(i(&a) + i(&b) >= i(&join) + i(&meet) - 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn product_is_supermodular(
        y in prop::collection::vec(0.0f64..3.0, 2..5),
        x in prop::collection::vec(0.0f64..0.9, 5),
        h in 1e-3f64..0.1,
    ) {
        let n = y.len();
        let f = |x: &[f64]| (0..n).map(|s| x[s].powf(y[s])).product::<f64>();
        for i in 0..n {
            for j in (i + 1)..n {
                let mut xi = x[..n].to_vec();
                xi[i] += h;
                let mut xj = x[..n].to_vec();
                xj[j] += h;
                let mut xij = xi.clone();
                xij[j] += h;
                let d = f(&xij) - f(&xi) - f(&xj) + f(&x[..n]);
                prop_assert!(d >= -1e-9, "({i},{j}): {d}");
            }
        }
    }

    #[test]
    fn monotone_and_bounded(seed in any::<u64>(), bump in 0.0f64..0.5) {
        let (inst, mut rng) = setup(seed);
        let y = uniform_vec(&mut rng, inst.num_channels(), 0.0, 3.0);
        let x = uniform_vec(&mut rng, inst.num_edges(), 0.0, 1.0);
        let base = influence(&inst, &y, &x).unwrap();
        prop_assert!(base >= 0.0 && base <= inst.num_customers() as f64);
        for e in 0..inst.num_edges() {
            let mut up = x.clone();
            up[e] = (up[e] + bump).min(1.0);
            prop_assert!(influence(&inst, &y, &up).unwrap() <= base + 1e-12);
        }
        for s in 0..inst.num_channels() {
            let mut up = y.clone();
            up[s] += bump;
            prop_assert!(influence(&inst, &up, &x).unwrap() >= base - 1e-12);
        }
    }

    #[test]
    fn gradients_match_central_differences(seed in any::<u64>()) {
        let (inst, mut rng) = setup(seed);
        let y = uniform_vec(&mut rng, inst.num_channels(), 0.1, 3.0);
        let x = uniform_vec(&mut rng, inst.num_edges(), 0.05, 0.95);
        let h = 1e-6;
        let close = |g: f64, fd: f64| (g - fd).abs() <= 1e-5 * g.abs().max(1e-2);

        let gy = influence_grad_y(&inst, &y, &x).unwrap();
        for s in 0..y.len() {
            let (mut p, mut m) = (y.clone(), y.clone());
            p[s] += h;
            m[s] -= h;
            let fd = (influence(&inst, &p, &x).unwrap() - influence(&inst, &m, &x).unwrap()) / (2.0 * h);
            prop_assert!(close(gy[s], fd), "dy[{s}]: {} vs {fd}", gy[s]);
        }
        let gx = influence_grad_x(&inst, &y, &x).unwrap();
        for e in 0..x.len() {
            let (mut p, mut m) = (x.clone(), x.clone());
            p[e] += h;
            m[e] -= h;
            let fd = (influence(&inst, &y, &p).unwrap() - influence(&inst, &y, &m).unwrap()) / (2.0 * h);
            prop_assert!(close(gx[e], fd), "dx[{e}]: {} vs {fd}", gx[e]);
        }
    }
}

#[test]
fn expected_influence_matches_posterior_sampling() {
    const N: usize = 100_000;
    for seed in 0..4 {
        let (inst, mut rng) = setup(seed);
        let y = uniform_vec(&mut rng, inst.num_channels(), 0.0, 3.0);
        let dists: Vec<Beta<f64>> = inst
            .edges()
            .iter()
            .map(|e| Beta::new(e.alpha, e.beta).unwrap())
            .collect();
        let (mut sum, mut sum2) = (0.0, 0.0);
        let mut x = vec![0.0; inst.num_edges()];
        for _ in 0..N {
            for (xe, d) in x.iter_mut().zip(&dists) {
                *xe = d.sample(&mut rng);
            }
            let v = influence(&inst, &y, &x).unwrap();
            sum += v;
            sum2 += v * v;
        }
        let mean = sum / N as f64;
        let se = ((sum2 / N as f64 - mean * mean) / N as f64).sqrt();
        let exact = beta_expected_influence(&inst, &y).unwrap();
        assert!(
            (exact - mean).abs() <= 3.0 * se + 1e-12,
            "seed {seed}: {exact} vs {mean} +- {se}"
        );
    }
}
