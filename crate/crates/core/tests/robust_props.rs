mod common;

use common::{random_instance, uniform_vec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_alloc::baselines::{
    dnorm_linear_oracle, evaluate_allocations, fw_adversary, solve_expected, solve_nominal, spread_start, Candidate,
};
use robust_alloc::csfm::CsfmOptions;
use robust_alloc::model::{beta_expected_influence, influence};
use robust_alloc::robust::{project_budget, solve_robust, AscentOptions, RobustOptions};
use robust_alloc::UncertaintySet;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn saddle_trace_invariants(seed in any::<u64>(), dnorm in any::<bool>(), cap in 0.5f64..4.0) {
        let inst = random_instance(seed, 3, 2);
        let set = if dnorm {
            UncertaintySet::dnorm_full(&inst, 1.0).unwrap()
        } else {
            UncertaintySet::ellipsoidal(&inst, 1.0).unwrap()
        };
        let mut opts = RobustOptions::new(cap, 1e-2, 1e-2);
        opts.max_iters = 60;
        let rep = solve_robust(&inst, &set, &opts).unwrap();

        let y = rep.y_robust.as_slice();
        prop_assert!(y.iter().all(|v| *v >= 0.0));
        prop_assert!(y.iter().sum::<f64>() <= cap + 1e-9);

        let max_certified = rep.records.iter().map(|r| r.lower_certified).fold(f64::NEG_INFINITY, f64::max);
        let min_upper = rep.records.iter().map(|r| r.upper).fold(f64::INFINITY, f64::min);
        prop_assert!(max_certified <= min_upper + 1e-12, "{max_certified} > {min_upper}");

        for (k, w) in rep.records.windows(2).enumerate() {
            prop_assert!(w[1].lower_best >= w[0].lower_best, "L_best fell at {k}");
            prop_assert!(w[1].upper_best <= w[0].upper_best, "U_best rose at {k}");
        }
        let last = rep.records.len() - 1;
        for r in &rep.records[..last] {
            prop_assert!(r.step.is_finite() && r.step >= 0.0);
            if r.gap > 0.0 {
                prop_assert!(r.step > 0.0 || r.upper_best <= r.lower, "zero step at {}", r.iter);
            }
        }
    }

    #[test]
    fn baselines_beat_a_simplex_grid(seed in any::<u64>(), cap in 0.5f64..4.0) {
        let inst = random_instance(seed, 3, 3);
        let opts = AscentOptions { tol: 1e-7, ..AscentOptions::default() };
        let nominal = solve_nominal(&inst, cap, &opts).unwrap();
        let expected = solve_expected(&inst, cap, &opts).unwrap();
        let x_hat = inst.x_hat();

        let n = inst.num_channels();
        let steps = 40usize;
        let mut grid_nom = f64::NEG_INFINITY;
        let mut grid_exp = f64::NEG_INFINITY;
        for a in 0..=steps {
            for b in 0..=(if n > 1 { steps - a } else { 0 }) {
                let mut y = vec![a as f64, b as f64, (steps - a - b) as f64];
                y.truncate(n);
                let y: Vec<f64> = y.iter().map(|v| v * cap / steps as f64).collect();
                grid_nom = grid_nom.max(influence(&inst, &y, &x_hat).unwrap());
                grid_exp = grid_exp.max(beta_expected_influence(&inst, &y).unwrap());
            }
        }
        prop_assert!(nominal.value >= grid_nom - 1e-6, "{} < {grid_nom}", nominal.value);
        prop_assert!(expected.value >= grid_exp - 1e-6, "{} < {grid_exp}", expected.value);
        prop_assert!(nominal.value <= nominal.upper_bound + 1e-12);
        prop_assert!(expected.value <= expected.upper_bound + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn linear_oracle_has_at_most_one_fractional_entry(seed in any::<u64>(), gamma in 0.0f64..5.0) {
        let inst = random_instance(seed, 4, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set = UncertaintySet::dnorm_full(&inst, gamma).unwrap();
        let g = uniform_vec(&mut rng, inst.num_edges(), -1.0, 1.0);
        let x = dnorm_linear_oracle(&g, &set).unwrap();
        let c: Vec<f64> = (0..x.len())
            .map(|e| (x[e] - set.center()[e]) / (set.hi()[e] - set.center()[e]))
            .collect();
        let fractional = c.iter().filter(|v| **v > 1e-12 && **v < 1.0 - 1e-12).count();
        prop_assert!(fractional <= 1, "{c:?}");
        prop_assert!(c.iter().sum::<f64>() <= gamma + 1e-9);
    }

    #[test]
    fn fw_trace_never_exceeds_nominal(seed in any::<u64>(), gamma in 0.0f64..4.0) {
        let inst = random_instance(seed, 3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = uniform_vec(&mut rng, inst.num_channels(), 0.0, 2.0);
        let set = UncertaintySet::dnorm_full(&inst, gamma).unwrap();
        let nominal = influence(&inst, &y, &inst.x_hat()).unwrap();
        for x0 in [inst.x_hat(), spread_start(&set)] {
            let tr = fw_adversary(&inst, &y, &set, &x0, 30).unwrap();
            prop_assert!(tr.values.iter().all(|v| *v <= nominal + 1e-12));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Each worst case is within its certified gap of the exact minimum, and
    /// the exact minimum is nonincreasing in gamma.
    #[test]
    fn worst_case_nonincreasing_in_gamma(seed in any::<u64>(), dnorm in any::<bool>()) {
        let inst = random_instance(seed, 3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set = if dnorm {
            UncertaintySet::dnorm_full(&inst, 1.0).unwrap()
        } else {
            UncertaintySet::ellipsoidal(&inst, 1.0).unwrap()
        };
        let cap = rng.random_range(0.5..3.0);
        let y = project_budget(&uniform_vec(&mut rng, inst.num_channels(), 0.0, 2.0), cap).unwrap();
        let cands = [Candidate { name: "y".into(), y }];
        let gammas = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];
        let opts = CsfmOptions { delta: 0.01, target_gap: 1e-4, ..CsfmOptions::default() };
        let rows = evaluate_allocations(&inst, &[set], &gammas, &cands, &opts).unwrap();
        for w in rows.windows(2) {
            prop_assert!(
                w[1].worst_case <= w[0].worst_case + w[1].certified_gap + 1e-9,
                "gamma {} -> {}: {} > {}", w[0].gamma, w[1].gamma, w[1].worst_case, w[0].worst_case
            );
        }
    }
}
