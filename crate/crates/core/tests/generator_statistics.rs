mod common;

use dpimpute::simulation::{generate_population, inject_missingness, run_dataset};
use dpimpute::{RandomSource, SimConfig};

#[test]
fn quadrature_oracle_sanity() {
    let (mean, var) = common::response_mean_and_variance();
    assert!((mean - 0.5).abs() < 1e-9, "{mean}");
    // Between the noiseless variance 1/24 and the unclipped 1/24 + σ².
    assert!(var > 1.0 / 24.0 && var < 1.0 / 24.0 + 0.1, "{var}");
    let m0 = common::observed_conditional_mean();
    assert!(m0 > 5.0 / 12.0 && m0 < 0.5, "{m0}");
}

#[test]
fn response_mean_within_three_standard_errors() {
    let (mean, var) = common::response_mean_and_variance();
    let cfg = SimConfig::default();
    let se = (var / cfg.n as f64).sqrt();
    for seed in 0..5 {
        let d = generate_population(&cfg, &mut RandomSource::new(seed)).unwrap();
        let m = d.observed_responses().sum::<f64>() / cfg.n as f64;
        assert!((m - mean).abs() < 3.0 * se, "seed {seed}: {m}");
        assert!(d.validate().is_ok());
    }
}

#[test]
fn response_variance_matches_quadrature() {
    let (_, var) = common::response_mean_and_variance();
    let cfg = SimConfig { n: 200_000, ..Default::default() };
    let d = generate_population(&cfg, &mut RandomSource::new(11)).unwrap();
    let ys: Vec<f64> = d.observed_responses().collect();
    let m = ys.iter().sum::<f64>() / ys.len() as f64;
    let v = ys.iter().map(|y| (y - m).powi(2)).sum::<f64>() / (ys.len() - 1) as f64;
    assert!((v - var).abs() < 0.01 * var, "{v} vs {var}");
}

#[test]
fn missing_count_is_binomial() {
    // P(M = 1) = E[X₁] = 1/2, so n_mis ~ Binomial(n, 1/2).
    let cfg = SimConfig::default();
    let n = cfg.n as f64;
    let band = 3.0 * (n * 0.25).sqrt();
    let mut outside = 0;
    let mut total = 0.0;
    let seeds = 200;
    for run in 1..=seeds {
        let d = run_dataset(&cfg, run).unwrap();
        let k = d.n_mis() as f64;
        total += k;
        if (k - n / 2.0).abs() > band {
            outside += 1;
        }
        assert!((k / n - 0.5).abs() < 0.02, "run {run}: rate {}", k / n);
    }
    // 0.27% expected outside; allow a handful.
    assert!(outside <= 4, "{outside} of {seeds} outside 3 sd");
    let mean = total / seeds as f64;
    assert!((mean - n / 2.0).abs() < 3.0 * (n * 0.25 / seeds as f64).sqrt(), "{mean}");
}

#[test]
fn missingness_rate_tracks_first_covariate() {
    let cfg = SimConfig { n: 100_000, ..Default::default() };
    let d = inject_missingness(
        &generate_population(&cfg, &mut RandomSource::new(21)).unwrap(),
        &mut RandomSource::new(22),
    )
    .unwrap();
    let bins = 10;
    let mut count = vec![0usize; bins];
    let mut miss = vec![0usize; bins];
    for i in 0..d.len() {
        let b = ((d.row(i)[0] * bins as f64) as usize).min(bins - 1);
        count[b] += 1;
        miss[b] += usize::from(d.is_missing(i));
    }
    for b in 0..bins {
        let p = (b as f64 + 0.5) / bins as f64;
        let rate = miss[b] as f64 / count[b] as f64;
        // Within-bin rate ≈ bin midpoint; the bin width adds at most 0.05 of spread.
        assert!((rate - p).abs() < 0.02, "bin {b}: {rate}");
    }
}

/// Welch t statistic between two samples.
fn welch_t(a: &[f64], b: &[f64]) -> f64 {
    let stats = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        let s2 = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
        (m, s2 / v.len() as f64)
    };
    let (ma, va) = stats(a);
    let (mb, vb) = stats(b);
    (ma - mb) / (va + vb).sqrt()
}

/// Within narrow bins of X₁ the response does not depend on the mask.
#[test]
fn missing_at_random_given_first_covariate() {
    let cfg = SimConfig { n: 200_000, ..Default::default() };
    let full = generate_population(&cfg, &mut RandomSource::new(31)).unwrap();
    let masked = inject_missingness(&full, &mut RandomSource::new(32)).unwrap();
    let bins = 20;
    let mut rejections = 0;
    for b in 0..bins {
        let (lo, hi) = (b as f64 / bins as f64, (b + 1) as f64 / bins as f64);
        let mut observed = Vec::new();
        let mut missing = Vec::new();
        for i in 0..full.len() {
            let x1 = full.row(i)[0];
            if x1 >= lo && x1 < hi {
                let y = full.response(i).unwrap();
                if masked.is_missing(i) {
                    missing.push(y);
                } else {
                    observed.push(y);
                }
            }
        }
        if observed.len() < 30 || missing.len() < 30 {
            continue;
        }
        if welch_t(&observed, &missing).abs() > 3.5 {
            rejections += 1;
        }
    }
    assert!(rejections <= 1, "{rejections} bins reject independence");
}

/// Sanity check of the test itself: binning on X₂ instead of X₁ does not
/// remove the dependence between mask and response.
#[test]
fn dependence_is_detectable_without_conditioning() {
    let cfg = SimConfig { n: 200_000, ..Default::default() };
    let full = generate_population(&cfg, &mut RandomSource::new(31)).unwrap();
    let masked = inject_missingness(&full, &mut RandomSource::new(32)).unwrap();
    let (mut observed, mut missing) = (Vec::new(), Vec::new());
    for i in 0..full.len() {
        let y = full.response(i).unwrap();
        if masked.is_missing(i) {
            missing.push(y);
        } else {
            observed.push(y);
        }
    }
    assert!(welch_t(&observed, &missing).abs() > 10.0);
}
