//! Batch-means confidence intervals.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

pub fn mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Unbiased sample variance.
pub fn variance(samples: &[f64]) -> f64 {
    let mu = mean(samples);
    samples.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (samples.len() - 1) as f64
}

/// Two-sided Student-t confidence half-width of the mean of `samples`
/// (non-overlapping batch means) at confidence `level`.
pub fn half_width(samples: &[f64], level: f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Estimation(format!(
            "need at least 2 batches for a confidence interval, got {}",
            samples.len()
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence level {level} outside (0, 1)"
        )));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Estimation("non-finite batch mean".into()));
    }
    let n = samples.len() as f64;
    let t = StudentsT::new(0.0, 1.0, n - 1.0)
        .map_err(|e| Error::Estimation(e.to_string()))?
        .inverse_cdf(0.5 + level / 2.0);
    Ok(t * (variance(samples) / n).sqrt())
}

/// 95% half-width.
pub fn half_width_95(samples: &[f64]) -> Result<f64> {
    half_width(samples, 0.95)
}
