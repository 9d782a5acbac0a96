//! Differentially private analysis of data with missing responses.
//!
//! The crate covers the sensitivity cost of imputing before a private query,
//! privately fitted regression imputation, the three release strategies built
//! from them, and a seeded Monte Carlo harness comparing the strategies.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod data;
pub mod error;
pub mod imputation;
pub mod io;
pub mod mechanisms;
pub mod rng;
pub mod sensitivity;
pub mod simulation;
pub mod strategies;
pub mod summary;

pub use budget::{LedgerEntry, PrivacyBudget};
pub use data::{hamming_distance, Dataset, Interval, Record, Universe, Violation};
pub use error::{Error, Result};
pub use imputation::{
    check_imputer_contract, fit_imputation_model, impute, FitOptions, ImputationModel, Imputer, MeanImputer,
    Privacy, RegressionImputer, SharedModelImputer,
};
pub use mechanisms::{
    functional_mechanism_ols, laplace_mechanism, laplace_sample, ols_fit, FunctionalMechanismConfig, OlsFit,
};
pub use rng::RandomSource;
pub use sensitivity::{
    brute_force_imputed_sensitivity, group_privacy_factor, inflated_sensitivity, mean_global_sensitivity,
    tightness_gap, tightness_witness, MeanQuery, OracleResult, OracleSpec, Query, SensitivityReport,
};
pub use simulation::{monte_carlo, monte_carlo_with_threads, SimConfig, SimOutput, SimSummary};
pub use strategies::{
    run_available_case, run_dp_impute_then_query, run_impute_then_query, run_strategy, PipelineOptions, QueryResult,
    Strategy,
};
pub use summary::{summarize, Summary};
