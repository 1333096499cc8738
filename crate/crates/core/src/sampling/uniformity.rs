//! Uniform variates from undersampled sinusoids, and a binned uniformity test.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{sample_sine, SineSamplingSpec};
use crate::error::{Error, Result};

/// Phase steps whose reduced denominator is below this revisit too few
/// distinct phases to look uniform.
pub const MIN_STEP_DENOMINATOR: u64 = 10_000;

/// CDF of the arcsine law followed by sin of a uniform phase.
pub fn arcsine_cdf(x: f64) -> f64 {
    0.5 + x.clamp(-1.0, 1.0).asin() / std::f64::consts::PI
}

/// Samples pushed through [`arcsine_cdf`]. Fails with `Degenerate` when the
/// per-sample phase step is a fraction with a small denominator.
pub fn undersampled_uniform(spec: &SineSamplingSpec) -> Result<Vec<f64>> {
    let (_, den) = spec.step_turns();
    if den.to_u64().is_some_and(|d| d < MIN_STEP_DENOMINATOR) {
        return Err(Error::Degenerate(format!(
            "f/fs mod 1 has denominator {den}; at most {den} distinct phases are visited"
        )));
    }
    Ok(sample_sine(spec)?.into_iter().map(arcsine_cdf).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
    pub counts: Vec<u64>,
    pub mean: f64,
    pub variance: f64,
}

/// Pearson χ² of `values` ⊂ [0, 1] against equal-width bins.
pub fn chi_square_uniformity(values: &[f64], bins: usize) -> Result<UniformityReport> {
    if bins < 2 {
        return Err(Error::invalid("need at least two bins"));
    }
    if values.len() < 5 * bins {
        return Err(Error::invalid(format!("{} values are too few for {bins} bins", values.len())));
    }
    if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Range("uniformity test values must lie in [0, 1]".into()));
    }
    let mut counts = vec![0u64; bins];
    for &v in values {
        counts[((v * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let n = values.len() as f64;
    let expected = n / bins as f64;
    let chi2 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dof = bins - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::invalid(e.to_string()))?;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(UniformityReport { chi2, dof, p_value: dist.sf(chi2), counts, mean, variance })
}
