//! The three ways of releasing a private mean from data with missing responses.
//!
//! * available-case: drop incomplete records, release the mean of the rest.
//! * impute-then-query: impute with a non-private model, release the mean with
//!   sensitivity inflated to `(n_mis + 1)·Δ`.
//! * dp-impute-then-query: fit the imputation model privately with `ε₁`, impute,
//!   release the mean with the plain `Δ` and `ε₂`. Sequential composition makes
//!   the whole pipeline `(ε₁ + ε₂)`-DP.
//!
//! Privacy caveats: available-case treats `n_obs` as public, and
//! impute-then-query calibrates to the realized `n_mis`. A release that must
//! hold for every dataset of size `n` would use the uniform bound `n·Δ`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::budget::{LedgerEntry, PrivacyBudget};
use crate::data::{Dataset, Universe};
use crate::error::{Error, Result};
use crate::imputation::{fit_imputation_model, impute, FitOptions, Privacy};
use crate::mechanisms::laplace_mechanism;
use crate::rng::RandomSource;
use crate::sensitivity::{evaluate_complete, inflated_sensitivity, MeanQuery, Query};

pub const LABEL_IMPUTATION: &str = "imputation";
pub const LABEL_ANALYSIS: &str = "analysis";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    AvailableCase,
    ImputeThenQuery,
    DpImputeThenQuery,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::AvailableCase, Strategy::ImputeThenQuery, Strategy::DpImputeThenQuery];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::AvailableCase => "available_case",
            Strategy::ImputeThenQuery => "impute_then_query",
            Strategy::DpImputeThenQuery => "dp_impute_then_query",
        }
    }

    /// Stream tag used for this strategy's mechanism noise.
    pub fn stream_tag(self) -> u64 {
        match self {
            Strategy::AvailableCase => 1,
            Strategy::ImputeThenQuery => 2,
            Strategy::DpImputeThenQuery => 3,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "available_case" | "available-case" => Ok(Strategy::AvailableCase),
            "impute_then_query" | "impute" => Ok(Strategy::ImputeThenQuery),
            "dp_impute_then_query" | "dp-impute" => Ok(Strategy::DpImputeThenQuery),
            other => Err(Error::InvalidArgument(format!("unknown strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub value: f64,
    pub sensitivity_used: f64,
    pub noise_scale: f64,
    pub epsilon_spent_total: f64,
    pub strategy: Strategy,
    pub n_mis_at_query: usize,
    pub ledger: Vec<LedgerEntry>,
    /// The estimate before noise. Diagnostics for simulations only; it is not
    /// private and is never serialized.
    #[serde(skip)]
    pub non_private_estimate: f64,
}

/// Options for the imputation-based strategies.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PipelineOptions {
    pub fit: FitOptions,
}

fn release(
    strategy: Strategy,
    estimate: f64,
    sensitivity: f64,
    n_mis: usize,
    mut budget: PrivacyBudget,
    rng: &mut RandomSource,
) -> Result<QueryResult> {
    let epsilon = budget.epsilon_analysis();
    budget.spend(LABEL_ANALYSIS, epsilon)?;
    let value = laplace_mechanism(estimate, sensitivity, epsilon, rng)?;
    let ledger = budget.into_ledger();
    Ok(QueryResult {
        value,
        sensitivity_used: sensitivity,
        noise_scale: sensitivity / epsilon,
        epsilon_spent_total: ledger.iter().map(|e| e.epsilon).sum(),
        strategy,
        n_mis_at_query: n_mis,
        ledger,
        non_private_estimate: estimate,
    })
}

/// Mean of observed responses, released with sensitivity `(b − a)/n_obs`.
pub fn run_available_case(d: &Dataset, epsilon: f64, rng: &mut RandomSource) -> Result<QueryResult> {
    let budget = PrivacyBudget::analysis_only(epsilon)?;
    let observed: Vec<f64> = d.observed_responses().collect();
    if observed.is_empty() {
        return Err(Error::NoObservedResponses);
    }
    let query = MeanQuery;
    let estimate = query.evaluate(&observed);
    let sensitivity = query.sensitivity(d.universe(), observed.len())?;
    release(Strategy::AvailableCase, estimate, sensitivity, 0, budget, rng)
}

/// Non-private imputation, then the mean with sensitivity `(n_mis + 1)(b − a)/n`.
pub fn run_impute_then_query(
    d: &Dataset,
    epsilon: f64,
    rng: &mut RandomSource,
    options: PipelineOptions,
) -> Result<QueryResult> {
    let budget = PrivacyBudget::analysis_only(epsilon)?;
    let query = MeanQuery;
    let n_mis = d.n_mis();
    let completed = if n_mis == 0 {
        d.clone()
    } else {
        let model = fit_imputation_model(d, Privacy::None, rng, options.fit)?;
        impute(d, &model, rng)?
    };
    let estimate = evaluate_complete(&query, &completed)?;
    let delta = query.sensitivity(d.universe(), d.len())?;
    let sensitivity = inflated_sensitivity(delta, n_mis).inflated_sensitivity;
    release(Strategy::ImputeThenQuery, estimate, sensitivity, n_mis, budget, rng)
}

/// Private imputation model with `ε₁`, deterministic imputation, then the mean
/// with sensitivity `(b − a)/n` and `ε₂`.
pub fn run_dp_impute_then_query(
    d: &Dataset,
    mut budget: PrivacyBudget,
    rng: &mut RandomSource,
    options: PipelineOptions,
) -> Result<QueryResult> {
    let query = MeanQuery;
    let eps1 = budget.epsilon_imputation();
    let opts = FitOptions {
        stochastic: false,
        ..options.fit
    };
    budget.spend(LABEL_IMPUTATION, eps1)?;
    let model = fit_imputation_model(d, Privacy::Dp { epsilon: eps1 }, rng, opts)?;
    let completed = impute(d, &model, rng)?;
    let estimate = evaluate_complete(&query, &completed)?;
    let sensitivity = query.sensitivity(d.universe(), d.len())?;
    release(Strategy::DpImputeThenQuery, estimate, sensitivity, d.n_mis(), budget, rng)
}

/// Runs one strategy with total budget `epsilon`; `split` is the imputation
/// share for the private-imputation strategy and ignored otherwise.
pub fn run_strategy(
    strategy: Strategy,
    d: &Dataset,
    epsilon: f64,
    split: f64,
    rng: &mut RandomSource,
    options: PipelineOptions,
) -> Result<QueryResult> {
    match strategy {
        Strategy::AvailableCase => run_available_case(d, epsilon, rng),
        Strategy::ImputeThenQuery => run_impute_then_query(d, epsilon, rng, options),
        Strategy::DpImputeThenQuery => {
            run_dp_impute_then_query(d, PrivacyBudget::split(epsilon, split)?, rng, options)
        }
    }
}

/// `(b − a)/n` for the mean of a complete dataset of size `n`.
pub fn base_sensitivity(universe: &Universe, n: usize) -> Result<f64> {
    MeanQuery.sensitivity(universe, n)
}
