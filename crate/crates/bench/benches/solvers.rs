use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use robust_alloc::csfm::{
    fw_solve, greedy_base_vertex, pav_isotonic, regularizer_coefficients, Discretization, FwOptions, RhoProfile,
};
use robust_alloc::robust::{adversary_best_response, solve_robust, AdversaryObjective, RobustOptions};
use robust_alloc::{BudgetVector, UncertaintySet};
use robust_alloc_bench::{instance, noise};

fn pav(c: &mut Criterion) {
    let mut g = c.benchmark_group("pav");
    for n in [100, 10_000, 1_000_000] {
        let z = noise(n, 1);
        let r: Vec<f64> = noise(n, 2).iter().map(|v| 1.5 + v).collect();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| pav_isotonic(black_box(&z), &r).unwrap())
        });
    }
    g.finish();
}

fn inner_solvers(c: &mut Criterion) {
    let mut g = c.benchmark_group("adversary");
    g.sample_size(10);
    for (channels, customers, degree) in [(6, 2, None), (100, 500, Some(5))] {
        let inst = instance(channels, customers, degree, 7);
        let y = BudgetVector::uniform(inst.num_channels(), 4.0);
        let set = UncertaintySet::dnorm_full(&inst, 2.0).unwrap();
        let obj = AdversaryObjective::new(&inst, y.as_slice()).unwrap();
        let label = format!("{}x{}", channels, customers);

        for delta in [1e-2, 1e-3] {
            let disc = Discretization::uniform(set.lo(), set.hi(), delta).unwrap();
            let rho = RhoProfile::zeros(&disc);
            g.bench_function(BenchmarkId::new(format!("greedy/{label}"), delta), |b| {
                b.iter(|| greedy_base_vertex(&obj, &disc, black_box(&rho)).unwrap())
            });
        }

        let disc = Discretization::uniform(set.lo(), set.hi(), 1e-2).unwrap();
        let coeffs = regularizer_coefficients(&set, &disc);
        let fw = FwOptions {
            epsilon: 1e-6,
            ..FwOptions::default()
        };
        g.bench_function(BenchmarkId::new("fw_solve", &label), |b| {
            b.iter(|| fw_solve(&obj, &disc, &coeffs, &fw, None).unwrap())
        });

        let opts = RobustOptions::new(4.0, 1e-2, 1e-2).csfm_options();
        g.bench_function(BenchmarkId::new("best_response", &label), |b| {
            b.iter(|| adversary_best_response(&inst, &set, y.as_slice(), &opts, None).unwrap())
        });
    }
    g.finish();
}

fn saddle(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_robust");
    g.sample_size(10);
    let inst = instance(6, 2, None, 11);
    for (name, set) in [
        ("ellipsoid", UncertaintySet::ellipsoidal(&inst, 1.0).unwrap()),
        ("dnorm", UncertaintySet::dnorm_full(&inst, 1.0).unwrap()),
    ] {
        let opts = RobustOptions::new(4.0, 1e-2, 1e-3);
        g.bench_function(name, |b| b.iter(|| solve_robust(&inst, &set, &opts).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, pav, inner_solvers, saddle);
criterion_main!(benches);
