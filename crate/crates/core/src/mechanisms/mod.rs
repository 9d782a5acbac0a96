//! Noise mechanisms and regression fitters.

mod functional;
mod laplace;
mod ols;

pub use functional::{
    functional_mechanism_ols, functional_mechanism_ols_with_objective, functional_mechanism_sensitivity,
    FunctionalMechanismConfig, PerturbedObjective, DEFAULT_COEFFICIENT_BOUND,
};
pub use laplace::{laplace_mechanism, laplace_quantile, laplace_sample};
pub use ols::{augment_intercept, ols_fit, SINGULAR_TOLERANCE};

use serde::{Deserialize, Serialize};

/// Fitted linear model `y ≈ x'β` (constant column last when `intercept`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub beta: Vec<f64>,
    /// Residual variance estimate. Always 0 for private fits, where it is not usable.
    pub sigma2_hat: f64,
    pub n_used: usize,
    pub intercept: bool,
    pub private: bool,
    pub epsilon_spent: f64,
}

impl OlsFit {
    /// Number of covariates the model expects (excluding the constant column).
    pub fn dim(&self) -> usize {
        self.beta.len() - usize::from(self.intercept)
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        debug_assert_eq!(x.len(), d);
        let linear: f64 = x.iter().zip(&self.beta[..d]).map(|(a, b)| a * b).sum();
        if self.intercept {
            linear + self.beta[d]
        } else {
            linear
        }
    }

    /// Whether `sigma2_hat` may drive stochastic imputation.
    pub fn sigma2_usable(&self) -> bool {
        !self.private
    }
}
