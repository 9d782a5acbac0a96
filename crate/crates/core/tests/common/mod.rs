//! Quadrature oracles for the clipped-response generator.
//!
//! `S = β'X` with `X ~ U(0,1)^2`, `Y = clip(S + τ, 0, 1)`, `τ ~ N(0, σ²)`.
//! These are computed from closed-form normal integrals and composite Simpson
//! rules, independently of the simulation code.

#![allow(dead_code)]

/// Standard normal upper tail.
fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels + panels % 2;
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `E[clip(μ + τ, 0, 1)] = ∫₀¹ P(μ + τ > t) dt`.
pub fn clipped_mean(mu: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return mu.clamp(0.0, 1.0);
    }
    simpson(|t| normal_sf((t - mu) / sigma), 0.0, 1.0, 64)
}

/// `E[clip(μ + τ, 0, 1)²] = ∫₀¹ 2t P(μ + τ > t) dt`.
pub fn clipped_second_moment(mu: f64, sigma: f64) -> f64 {
    simpson(|t| 2.0 * t * normal_sf((t - mu) / sigma), 0.0, 1.0, 64)
}

/// `∫∫_{[0,1]²} f(x1, x2)` by a tensor Simpson rule.
pub fn integrate_unit_square(f: impl Fn(f64, f64) -> f64, panels: usize) -> f64 {
    simpson(|x1| simpson(|x2| f(x1, x2), 0.0, 1.0, panels), 0.0, 1.0, panels)
}

const BETA: [f64; 2] = [0.5, 0.5];
const SIGMA2: f64 = 0.1;

/// `E[Y | M = 0]` when `P(M = 1 | X) = X₁`.
pub fn observed_conditional_mean() -> f64 {
    let s = SIGMA2.sqrt();
    let num = integrate_unit_square(|a, b| clipped_mean(BETA[0] * a + BETA[1] * b, s) * (1.0 - a), 64);
    num / 0.5
}

pub fn response_mean_and_variance() -> (f64, f64) {
    let s = SIGMA2.sqrt();
    let m1 = integrate_unit_square(|a, b| clipped_mean(BETA[0] * a + BETA[1] * b, s), 64);
    let m2 = integrate_unit_square(|a, b| clipped_second_moment(BETA[0] * a + BETA[1] * b, s), 64);
    (m1, m2 - m1 * m1)
}

/// Population least-squares coefficients of `Y` on `(X₁, X₂)` without intercept.
pub fn projection_no_intercept() -> [f64; 2] {
    let s = SIGMA2.sqrt();
    let c1 = integrate_unit_square(|a, b| a * clipped_mean(BETA[0] * a + BETA[1] * b, s), 64);
    let c2 = integrate_unit_square(|a, b| b * clipped_mean(BETA[0] * a + BETA[1] * b, s), 64);
    // E[XX'] = [[1/3, 1/4], [1/4, 1/3]].
    let (p, q) = (1.0 / 3.0, 0.25);
    let det = p * p - q * q;
    [(p * c1 - q * c2) / det, (p * c2 - q * c1) / det]
}

/// Mean squared deviation of functional-mechanism coefficients from OLS on the
/// same data, for each ε, over paired seeds. Seeds where any ε hits an
/// irrecoverable perturbation are dropped from every column; the second value
/// counts them.
pub fn fm_deviation_by_epsilon(epsilons: &[f64], seeds: u64, n: usize) -> (Vec<f64>, usize) {
    use dpimpute::imputation::complete_cases;
    use dpimpute::simulation::generate_population;
    use dpimpute::{functional_mechanism_ols, ols_fit, Error, FunctionalMechanismConfig, Interval, RandomSource, SimConfig};

    let cfg = SimConfig { n, ..Default::default() };
    let mut sums = vec![0.0; epsilons.len()];
    let mut kept = 0usize;
    let mut dropped = 0usize;
    for seed in 0..seeds {
        let d = generate_population(&cfg, &mut RandomSource::with_stream(seed, 0)).unwrap();
        let (x, y) = complete_cases(&d);
        let ols = ols_fit(&x, &y, false).unwrap();
        let mut devs = Vec::with_capacity(epsilons.len());
        for &eps in epsilons {
            let mut rng = RandomSource::with_stream(seed, 1);
            match functional_mechanism_ols(&x, &y, Interval::unit(), eps, &mut rng, FunctionalMechanismConfig::default()) {
                Ok(fit) => devs.push(fit.beta.iter().zip(&ols.beta).map(|(a, b)| (a - b).powi(2)).sum::<f64>()),
                Err(Error::IrrecoverablePerturbation { .. }) => break,
                Err(e) => panic!("seed {seed} eps {eps}: {e}"),
            }
        }
        if devs.len() < epsilons.len() {
            dropped += 1;
            continue;
        }
        kept += 1;
        for (s, d) in sums.iter_mut().zip(devs) {
            *s += d;
        }
    }
    (sums.into_iter().map(|s| s / kept as f64).collect(), dropped)
}
