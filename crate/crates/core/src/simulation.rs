//! Monte Carlo comparison of the three strategies.
//!
//! Each run draws covariates `X ~ U(0,1)^d`, responses `Y = X'β + τ` with
//! `τ ~ N(0, σ²)` clipped to `[0, 1]`, then masks `Yᵢ` with probability equal
//! to the record's first covariate (missing at random given `X₁`). Every
//! configured strategy runs on the same realized dataset.
//!
//! Seeding: run `r` (1-based) uses `run_seed = derive_seed(seed, r)`. Data is
//! drawn from `RandomSource::with_stream(run_seed, 0)`; strategy `s` draws its
//! mechanism noise from `RandomSource::with_stream(run_seed, s.stream_tag())`.
//! Runs are therefore independent of worker count and scheduling.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Universe};
use crate::error::{Error, Result};
use crate::imputation::FitOptions;
use crate::mechanisms::DEFAULT_COEFFICIENT_BOUND;
use crate::rng::{derive_seed, RandomSource};
use crate::strategies::{run_strategy, PipelineOptions, Strategy};
use crate::summary::{summarize, Summary};

/// Population mean of `Y` under the default generator; clipping is symmetric
/// about 1/2, so the mean stays at 1/2.
pub const TRUE_MEAN: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub n: usize,
    pub d: usize,
    pub beta: Vec<f64>,
    pub sigma2: f64,
    pub epsilon: f64,
    pub split: f64,
    pub runs: usize,
    pub seed: u64,
    pub strategies: Vec<Strategy>,
    /// Fit the imputation model with a constant column.
    pub intercept: bool,
    pub coefficient_bound: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            d: 2,
            beta: vec![0.5, 0.5],
            sigma2: 0.1,
            epsilon: 1.0,
            split: 0.5,
            runs: 500,
            seed: 0,
            strategies: Strategy::ALL.to_vec(),
            intercept: true,
            coefficient_bound: DEFAULT_COEFFICIENT_BOUND,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.d == 0 {
            return bad("d must be positive".into());
        }
        if self.beta.len() != self.d {
            return bad(format!("beta has {} entries, d = {}", self.beta.len(), self.d));
        }
        if !self.beta.iter().all(|b| b.is_finite()) {
            return bad("beta must be finite".into());
        }
        if !(self.sigma2.is_finite() && self.sigma2 >= 0.0) {
            return bad(format!("sigma2 must be nonnegative, got {}", self.sigma2));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(0.0..=1.0).contains(&self.split) {
            return bad(format!("split must lie in [0, 1], got {}", self.split));
        }
        if self.runs == 0 {
            return bad("runs must be positive".into());
        }
        if self.strategies.is_empty() {
            return bad("at least one strategy is required".into());
        }
        if !(self.coefficient_bound > 0.0) {
            return bad("coefficient_bound must be positive".into());
        }
        Ok(())
    }

    fn pipeline_options(&self) -> PipelineOptions {
        PipelineOptions {
            fit: FitOptions {
                stochastic: false,
                intercept: self.intercept,
                coefficient_bound: self.coefficient_bound,
            },
        }
    }

    /// Configured strategies, deduplicated, in canonical order.
    pub fn strategy_list(&self) -> Vec<Strategy> {
        let mut s = self.strategies.clone();
        s.sort();
        s.dedup();
        s
    }
}

/// Complete dataset from the generator. `cfg.beta` and `cfg.d` must agree.
pub fn generate_population(cfg: &SimConfig, rng: &mut RandomSource) -> Result<Dataset> {
    if cfg.beta.len() != cfg.d {
        return Err(Error::InvalidArgument(format!("beta has {} entries, d = {}", cfg.beta.len(), cfg.d)));
    }
    let sd = cfg.sigma2.sqrt();
    let mut x = Vec::with_capacity(cfg.n * cfg.d);
    let mut y = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let start = x.len();
        for _ in 0..cfg.d {
            x.push(rng.uniform());
        }
        let mean: f64 = x[start..].iter().zip(&cfg.beta).map(|(a, b)| a * b).sum();
        y.push((mean + sd * rng.standard_normal()).clamp(0.0, 1.0));
    }
    Dataset::new(x, y, vec![false; cfg.n], Universe::unit(cfg.d))
}

/// Masks each response independently with probability equal to the record's
/// first covariate.
pub fn inject_missingness(d: &Dataset, rng: &mut RandomSource) -> Result<Dataset> {
    if d.dim() == 0 {
        return Err(Error::InvalidArgument("missingness needs at least one covariate".into()));
    }
    if d.n_mis() != 0 {
        return Err(Error::InvalidArgument("dataset already has missing values".into()));
    }
    let mask = (0..d.len()).map(|i| rng.uniform() < d.row(i)[0]).collect();
    d.with_mask(mask)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub run: usize,
    pub strategy: Strategy,
    pub value: f64,
    pub n_mis: usize,
    pub epsilon_spent: f64,
    pub sensitivity_used: f64,
    /// Pre-noise estimate, kept in memory for diagnostics and never written out.
    #[serde(skip)]
    pub estimate: f64,
    #[serde(skip)]
    pub ledger_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunFailure {
    pub run: usize,
    pub strategy: Strategy,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub failures: usize,
    /// `None` when every run failed.
    pub stats: Option<Summary>,
    pub bias: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSummary {
    pub true_mean: f64,
    pub strategies: Vec<StrategySummary>,
}

impl SimSummary {
    pub fn get(&self, strategy: Strategy) -> Option<&StrategySummary> {
        self.strategies.iter().find(|s| s.strategy == strategy)
    }
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub records: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
    pub summary: SimSummary,
}

impl SimOutput {
    pub fn values(&self, strategy: Strategy) -> Vec<f64> {
        self.records.iter().filter(|r| r.strategy == strategy).map(|r| r.value).collect()
    }

    pub fn estimates(&self, strategy: Strategy) -> Vec<f64> {
        self.records.iter().filter(|r| r.strategy == strategy).map(|r| r.estimate).collect()
    }
}

/// Dataset for run `run` (1-based), after missingness injection.
pub fn run_dataset(cfg: &SimConfig, run: usize) -> Result<Dataset> {
    let mut rng = RandomSource::with_stream(derive_seed(cfg.seed, run as u64), 0);
    let population = generate_population(cfg, &mut rng)?;
    inject_missingness(&population, &mut rng)
}

fn run_one(cfg: &SimConfig, strategies: &[Strategy], run: usize) -> Vec<std::result::Result<RunRecord, RunFailure>> {
    let data = match run_dataset(cfg, run) {
        Ok(d) => d,
        Err(e) => {
            return strategies
                .iter()
                .map(|&strategy| Err(RunFailure { run, strategy, error: e.to_string() }))
                .collect()
        }
    };
    let run_seed = derive_seed(cfg.seed, run as u64);
    let options = cfg.pipeline_options();
    strategies
        .iter()
        .map(|&strategy| {
            let mut rng = RandomSource::with_stream(run_seed, strategy.stream_tag());
            run_strategy(strategy, &data, cfg.epsilon, cfg.split, &mut rng, options)
                .map(|r| RunRecord {
                    run,
                    strategy,
                    value: r.value,
                    n_mis: data.n_mis(),
                    epsilon_spent: r.epsilon_spent_total,
                    sensitivity_used: r.sensitivity_used,
                    estimate: r.non_private_estimate,
                    ledger_total: r.ledger.iter().map(|e| e.epsilon).sum(),
                })
                .map_err(|e| RunFailure { run, strategy, error: e.to_string() })
        })
        .collect()
}

/// Runs the sweep on the current rayon pool.
pub fn monte_carlo(cfg: &SimConfig) -> Result<SimOutput> {
    cfg.validate()?;
    let strategies = cfg.strategy_list();
    let per_run: Vec<_> = (1..=cfg.runs)
        .into_par_iter()
        .map(|run| run_one(cfg, &strategies, run))
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for outcome in per_run.into_iter().flatten() {
        match outcome {
            Ok(r) => records.push(r),
            Err(f) => failures.push(f),
        }
    }
    let summary = SimSummary {
        true_mean: TRUE_MEAN,
        strategies: strategies
            .iter()
            .map(|&strategy| {
                let values: Vec<f64> = records.iter().filter(|r| r.strategy == strategy).map(|r| r.value).collect();
                let stats = summarize(&values).ok();
                StrategySummary {
                    strategy,
                    failures: failures.iter().filter(|f| f.strategy == strategy).count(),
                    bias: stats.map(|s| s.mean - TRUE_MEAN),
                    stats,
                }
            })
            .collect(),
    };
    Ok(SimOutput { records, failures, summary })
}

/// Runs the sweep on a dedicated pool with `threads` workers (0 = rayon default).
pub fn monte_carlo_with_threads(cfg: &SimConfig, threads: usize) -> Result<SimOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| monte_carlo(cfg))
}

/// Shortest round-trip decimal form.
pub fn format_f64(v: f64) -> String {
    format!("{v}")
}

pub const RUNS_HEADER: &str = "run,strategy,value,n_mis,epsilon_spent,sensitivity_used";
pub const SUMMARY_HEADER: &str = "strategy,count,mean,bias,variance,min,q1,median,q3,max";

/// `runs.csv`: UTF-8, LF line endings, one row per successful (run, strategy).
pub fn runs_csv(records: &[RunRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(RUNS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.run,
            r.strategy,
            format_f64(r.value),
            r.n_mis,
            format_f64(r.epsilon_spent),
            format_f64(r.sensitivity_used)
        );
    }
    out
}

/// `summary.csv`: one row per strategy; statistics are empty when every run failed.
pub fn summary_csv(summary: &SimSummary) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for s in &summary.strategies {
        match (&s.stats, s.bias) {
            (Some(st), Some(bias)) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    s.strategy,
                    st.count,
                    format_f64(st.mean),
                    format_f64(bias),
                    format_f64(st.variance),
                    format_f64(st.min),
                    format_f64(st.q1),
                    format_f64(st.median),
                    format_f64(st.q3),
                    format_f64(st.max)
                );
            }
            _ => {
                let _ = writeln!(out, "{},0,,,,,,,,", s.strategy);
            }
        }
    }
    out
}
