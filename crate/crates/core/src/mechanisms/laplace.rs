use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Inverse CDF of Laplace(0, scale) at probability `p` in (0, 1).
pub fn laplace_quantile(p: f64, scale: f64) -> f64 {
    if p < 0.5 {
        scale * (2.0 * p).ln()
    } else {
        -scale * (2.0 - 2.0 * p).ln()
    }
}

/// One Laplace(0, scale) draw by inverse CDF on an open-interval uniform.
pub fn laplace_sample(scale: f64, rng: &mut RandomSource) -> Result<f64> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidArgument(format!("laplace scale must be positive, got {scale}")));
    }
    Ok(laplace_quantile(rng.uniform_open(), scale))
}

/// Releases `value + Laplace(sensitivity / epsilon)`. The output is not clipped.
pub fn laplace_mechanism(value: f64, sensitivity: f64, epsilon: f64, rng: &mut RandomSource) -> Result<f64> {
    if !(sensitivity.is_finite() && sensitivity > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sensitivity must be positive, got {sensitivity}"
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(value + laplace_sample(sensitivity / epsilon, rng)?)
}
