//! Ordinary least squares through the normal equations.
//!
//! The Gram system `X'X β = X'y` is solved with a fully pivoted LU
//! factorization. The design is declared degenerate when the smallest pivot
//! magnitude falls below `SINGULAR_TOLERANCE` times the largest.

use nalgebra::{DMatrix, DVector};

use super::OlsFit;
use crate::error::{Error, Result};

/// Relative pivot tolerance for declaring the Gram matrix singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-10;

/// Appends a constant column of ones.
pub fn augment_intercept(x: &DMatrix<f64>) -> DMatrix<f64> {
    x.clone().insert_column(x.ncols(), 1.0)
}

pub(crate) fn design(x: &DMatrix<f64>, intercept: bool) -> DMatrix<f64> {
    if intercept {
        augment_intercept(x)
    } else {
        x.clone()
    }
}

/// Solves a symmetric Gram system, failing on (near-)singular matrices.
pub(crate) fn solve_gram(gram: DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let lu = gram.full_piv_lu();
    let u = lu.u();
    let pivots: Vec<f64> = u.diagonal().iter().map(|v| v.abs()).collect();
    let max = pivots.iter().copied().fold(0.0, f64::max);
    let min = pivots.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min <= SINGULAR_TOLERANCE * max {
        return Err(Error::DegenerateDesign(format!(
            "Gram matrix is singular (pivot ratio {:.3e})",
            if max > 0.0 { min / max } else { 0.0 }
        )));
    }
    lu.solve(rhs)
        .ok_or_else(|| Error::DegenerateDesign("Gram matrix is singular".into()))
}

pub fn ols_fit(x: &DMatrix<f64>, y: &[f64], intercept: bool) -> Result<OlsFit> {
    let n = x.nrows();
    if y.len() != n {
        return Err(Error::InvalidArgument(format!(
            "design has {n} rows but response has {} values",
            y.len()
        )));
    }
    let xd = design(x, intercept);
    let p = xd.ncols();
    if p == 0 {
        return Err(Error::DegenerateDesign("no columns".into()));
    }
    if n < p {
        return Err(Error::DegenerateDesign(format!("{n} rows for {p} coefficients")));
    }
    let yv = DVector::from_column_slice(y);
    let gram = xd.transpose() * &xd;
    let rhs = xd.transpose() * &yv;
    let beta = solve_gram(gram, &rhs)?;
    let residuals = &yv - &xd * &beta;
    let rss = residuals.norm_squared();
    let sigma2_hat = if n > p { rss / (n - p) as f64 } else { 0.0 };
    Ok(OlsFit {
        beta: beta.iter().copied().collect(),
        sigma2_hat,
        n_used: n,
        intercept,
        private: false,
        epsilon_spent: 0.0,
    })
}
