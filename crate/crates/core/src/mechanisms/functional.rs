//! Functional-mechanism linear regression.
//!
//! The squared-error objective `Σᵢ (yᵢ − xᵢ'β)²` is a polynomial in β:
//!
//! ```text
//! Σᵢ yᵢ²  +  Σⱼ (Σᵢ −2 yᵢ xᵢⱼ) βⱼ  +  Σⱼ Σₗ (Σᵢ xᵢⱼ xᵢₗ) βⱼ βₗ
//! ```
//!
//! The constant term does not move the minimizer and is dropped. Every
//! degree-1 coefficient and every ordered-pair degree-2 coefficient receives
//! independent Laplace noise, and the perturbed quadratic is minimized.
//!
//! # Sensitivity
//!
//! Covariates must lie in `[-1, 1]` and the response is mapped into `[-1, 1]`.
//! With an intercept, covariates are taken from `[0, 1]` and mapped by
//! `z = 2x − 1`, which centers the design and keeps the bound.
//! One tuple then contributes at most `|−2 y xⱼ| ≤ 2` to each of the `p`
//! linear coefficients and `|xⱼ xₗ| ≤ 1` to each of the `p²` quadratic ones,
//! so its total L1 contribution is at most `p² + 2p`. Replacing one tuple
//! removes one contribution and adds another, giving
//!
//! ```text
//! Δ = 2 (p² + 2p)
//! ```
//!
//! where `p` counts the constant column when an intercept is fitted.
//!
//! # Response scaling
//!
//! With an intercept the response interval `[a, b]` is mapped affinely onto
//! `[-1, 1]` and the shift is absorbed by the constant coefficient. Without an
//! intercept a shift cannot be absorbed, so the response is divided by
//! `max(|a|, |b|)` instead.
//!
//! # Post-processing
//!
//! The symmetrized quadratic form may be indefinite after perturbation. It is
//! repaired by adding `δI`, `δ = max(0, 1e-8 − λ_min)`; if `λ_min < −10·|trace|`
//! the draw is rejected. Coefficients are clipped to `[−C, C]` on the original
//! response scale. Both steps only touch the noisy output.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::laplace::laplace_sample;
use super::ols::design;
use super::OlsFit;
use crate::data::Interval;
use crate::error::{Error, Result};
use crate::rng::RandomSource;

pub const DEFAULT_COEFFICIENT_BOUND: f64 = 10.0;

const MIN_EIGENVALUE: f64 = 1e-8;
const IRRECOVERABLE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalMechanismConfig {
    pub intercept: bool,
    /// Bound `C` applied to every coefficient after fitting.
    pub coefficient_bound: f64,
}

impl Default for FunctionalMechanismConfig {
    fn default() -> Self {
        Self {
            intercept: false,
            coefficient_bound: DEFAULT_COEFFICIENT_BOUND,
        }
    }
}

/// L1 sensitivity of the degree-1 and degree-2 coefficient vector for `p`
/// model coefficients.
pub fn functional_mechanism_sensitivity(p: usize) -> f64 {
    let p = p as f64;
    2.0 * (p * p + 2.0 * p)
}

/// The repaired quadratic `β'Qβ + c'β` in the scaled response space, and its
/// unclipped minimizer.
#[derive(Debug, Clone)]
pub struct PerturbedObjective {
    pub quadratic: DMatrix<f64>,
    pub linear: DVector<f64>,
    pub ridge: f64,
    pub minimizer: DVector<f64>,
}

impl PerturbedObjective {
    pub fn gradient(&self, beta: &DVector<f64>) -> DVector<f64> {
        2.0 * &self.quadratic * beta + &self.linear
    }
}

struct ResponseScale {
    shift: f64,
    scale: f64,
}

impl ResponseScale {
    fn new(bounds: Interval, intercept: bool) -> Self {
        if intercept {
            Self {
                shift: 0.5 * (bounds.lo + bounds.hi),
                scale: 0.5 * bounds.width(),
            }
        } else {
            Self {
                shift: 0.0,
                scale: bounds.lo.abs().max(bounds.hi.abs()),
            }
        }
    }

    fn forward(&self, y: f64) -> f64 {
        (y - self.shift) / self.scale
    }
}

pub fn functional_mechanism_ols(
    x: &DMatrix<f64>,
    y: &[f64],
    response_bounds: Interval,
    epsilon: f64,
    rng: &mut RandomSource,
    config: FunctionalMechanismConfig,
) -> Result<OlsFit> {
    functional_mechanism_ols_with_objective(x, y, response_bounds, epsilon, rng, config).map(|(fit, _)| fit)
}

pub fn functional_mechanism_ols_with_objective(
    x: &DMatrix<f64>,
    y: &[f64],
    response_bounds: Interval,
    epsilon: f64,
    rng: &mut RandomSource,
    config: FunctionalMechanismConfig,
) -> Result<(OlsFit, PerturbedObjective)> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(config.coefficient_bound > 0.0) {
        return Err(Error::InvalidArgument("coefficient bound must be positive".into()));
    }
    let n = x.nrows();
    if y.len() != n {
        return Err(Error::InvalidArgument(format!(
            "design has {n} rows but response has {} values",
            y.len()
        )));
    }
    if n == 0 {
        return Err(Error::DegenerateDesign("no rows".into()));
    }
    let (cov_lo, cov_hi) = if config.intercept { (0.0, 1.0) } else { (-1.0, 1.0) };
    if let Some(v) = x.iter().find(|v| !(cov_lo..=cov_hi).contains(*v)) {
        return Err(Error::InvalidArgument(format!("covariate {v} outside [{cov_lo}, {cov_hi}]")));
    }
    if let Some(v) = y.iter().find(|v| !response_bounds.contains(**v)) {
        return Err(Error::InvalidArgument(format!(
            "response {v} outside [{}, {}]",
            response_bounds.lo, response_bounds.hi
        )));
    }

    let rs = ResponseScale::new(response_bounds, config.intercept);
    let xd = if config.intercept {
        design(&x.map(|v| 2.0 * v - 1.0), true)
    } else {
        design(x, false)
    };
    let p = xd.ncols();
    let ys = DVector::from_iterator(n, y.iter().map(|&v| rs.forward(v)));

    let mut linear = -2.0 * xd.transpose() * &ys;
    let mut quadratic = xd.transpose() * &xd;

    let noise_scale = functional_mechanism_sensitivity(p) / epsilon;
    for c in linear.iter_mut() {
        *c += laplace_sample(noise_scale, rng)?;
    }
    for j in 0..p {
        for l in 0..p {
            quadratic[(j, l)] += laplace_sample(noise_scale, rng)?;
        }
    }

    let symmetric = 0.5 * (&quadratic + quadratic.transpose());
    let trace = symmetric.trace();
    let eigen = SymmetricEigen::new(symmetric.clone());
    let lambda_min = eigen.eigenvalues.min();
    if lambda_min < -IRRECOVERABLE_FACTOR * trace.abs() {
        return Err(Error::IrrecoverablePerturbation { lambda_min, trace });
    }
    let ridge = (MIN_EIGENVALUE - lambda_min).max(0.0);
    let repaired = &symmetric + DMatrix::identity(p, p) * ridge;

    // Stationary point of β'Qβ + c'β: β = −½ Q⁻¹ c, via the eigenbasis.
    let vt_c = eigen.eigenvectors.transpose() * &linear;
    let scaled = DVector::from_iterator(
        p,
        vt_c.iter()
            .zip(eigen.eigenvalues.iter())
            .map(|(c, l)| -0.5 * c / (l + ridge)),
    );
    let minimizer = &eigen.eigenvectors * scaled;

    let bound = config.coefficient_bound;
    let mut beta: Vec<f64> = minimizer.iter().map(|b| b * rs.scale).collect();
    if config.intercept {
        // Undo z = 2x − 1: slopes double, the constant absorbs −Σ slopes.
        let slopes: f64 = beta[..p - 1].iter().sum();
        for b in &mut beta[..p - 1] {
            *b *= 2.0;
        }
        beta[p - 1] += rs.shift - slopes;
    }
    for b in beta.iter_mut() {
        *b = b.clamp(-bound, bound);
    }

    let fit = OlsFit {
        beta,
        sigma2_hat: 0.0,
        n_used: n,
        intercept: config.intercept,
        private: true,
        epsilon_spent: epsilon,
    };
    let objective = PerturbedObjective {
        quadratic: repaired,
        linear,
        ridge,
        minimizer,
    };
    Ok((fit, objective))
}
