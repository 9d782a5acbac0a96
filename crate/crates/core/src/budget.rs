use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for `epsilon_imputation + epsilon_analysis == epsilon_total`.
pub const SPLIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub label: String,
    pub epsilon: f64,
}

/// Total budget split between the imputation-model fit and the final query,
/// with an append-only record of what has been spent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    epsilon_total: f64,
    epsilon_imputation: f64,
    epsilon_analysis: f64,
    ledger: Vec<LedgerEntry>,
}

impl PrivacyBudget {
    /// Splits `epsilon_total` so that a fraction `split` goes to imputation.
    pub fn split(epsilon_total: f64, split: f64) -> Result<Self> {
        if !(epsilon_total.is_finite() && epsilon_total > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon_total must be positive and finite, got {epsilon_total}"
            )));
        }
        if !(0.0..=1.0).contains(&split) {
            return Err(Error::InvalidArgument(format!("split must lie in [0, 1], got {split}")));
        }
        let epsilon_imputation = epsilon_total * split;
        let epsilon_analysis = epsilon_total - epsilon_imputation;
        Self::new(epsilon_imputation, epsilon_analysis)
    }

    /// Budget with explicit parts; the total is their sum.
    pub fn new(epsilon_imputation: f64, epsilon_analysis: f64) -> Result<Self> {
        if !(epsilon_imputation.is_finite() && epsilon_imputation >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "imputation epsilon must be nonnegative, got {epsilon_imputation}"
            )));
        }
        if !(epsilon_analysis.is_finite() && epsilon_analysis > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "analysis epsilon must be positive, got {epsilon_analysis}"
            )));
        }
        Ok(Self {
            epsilon_total: epsilon_imputation + epsilon_analysis,
            epsilon_imputation,
            epsilon_analysis,
            ledger: Vec::new(),
        })
    }

    /// Budget with no imputation share.
    pub fn analysis_only(epsilon: f64) -> Result<Self> {
        Self::new(0.0, epsilon)
    }

    pub fn epsilon_total(&self) -> f64 {
        self.epsilon_total
    }

    pub fn epsilon_imputation(&self) -> f64 {
        self.epsilon_imputation
    }

    pub fn epsilon_analysis(&self) -> f64 {
        self.epsilon_analysis
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    pub fn spent(&self) -> f64 {
        self.ledger.iter().map(|e| e.epsilon).sum()
    }

    pub fn remaining(&self) -> f64 {
        (self.epsilon_total - self.spent()).max(0.0)
    }

    /// Records a charge. Fails without recording when the charge would push
    /// the total past `epsilon_total` (beyond rounding slack).
    pub fn spend(&mut self, label: impl Into<String>, epsilon: f64) -> Result<()> {
        let label = label.into();
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "charge for `{label}` must be positive, got {epsilon}"
            )));
        }
        let spent = self.spent();
        if spent + epsilon > self.epsilon_total * (1.0 + SPLIT_TOLERANCE) {
            return Err(Error::BudgetExhausted {
                label,
                requested: epsilon,
                remaining: self.epsilon_total - spent,
            });
        }
        self.ledger.push(LedgerEntry { label, epsilon });
        Ok(())
    }

    pub(crate) fn into_ledger(self) -> Vec<LedgerEntry> {
        self.ledger
    }
}
