use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dpimpute::imputation::complete_cases;
use dpimpute::sensitivity::{brute_force_imputed_sensitivity, MeanQuery, OracleSpec};
use dpimpute::{
    functional_mechanism_ols, monte_carlo_with_threads, ols_fit, FunctionalMechanismConfig, Interval, MeanImputer,
    PrivacyBudget, RandomSource, SimConfig, Universe,
};
use dpimpute_bench::fixture;

fn fitters(c: &mut Criterion) {
    let mut group = c.benchmark_group("fitters");
    for n in [1_000, 10_000] {
        let (x, y) = complete_cases(&fixture(n));
        group.bench_with_input(BenchmarkId::new("ols", n), &n, |b, _| {
            b.iter(|| ols_fit(black_box(&x), black_box(&y), true).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("functional_mechanism", n), &n, |b, _| {
            let cfg = FunctionalMechanismConfig { intercept: true, ..Default::default() };
            let mut rng = RandomSource::new(1);
            b.iter(|| functional_mechanism_ols(black_box(&x), black_box(&y), Interval::unit(), 0.5, &mut rng, cfg))
        });
    }
    group.finish();
}

fn strategies(c: &mut Criterion) {
    let d = fixture(10_000);
    let opts = dpimpute::PipelineOptions::default();
    c.bench_function("dp_impute_then_query/10000", |b| {
        let mut rng = RandomSource::new(2);
        b.iter(|| {
            let budget = PrivacyBudget::split(1.0, 0.5).unwrap();
            dpimpute::run_dp_impute_then_query(black_box(&d), budget, &mut rng, opts).unwrap()
        })
    });
}

fn sweep(c: &mut Criterion) {
    let cfg = SimConfig { runs: 20, seed: 3, ..Default::default() };
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("20_runs_n10000", |b| b.iter(|| monte_carlo_with_threads(black_box(&cfg), 0).unwrap()));
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let spec = OracleSpec { grid: vec![0.0, 0.5, 1.0], n: 4, universe: Universe::unit(0), allow_missing: true };
    c.bench_function("brute_force_mean_n4", |b| {
        b.iter(|| brute_force_imputed_sensitivity(black_box(&spec), &MeanImputer, &MeanQuery).unwrap())
    });
}

criterion_group!(benches, fitters, strategies, sweep, oracle);
criterion_main!(benches);
