//! Sampling of sinusoids whose frequency far exceeds the sample rate.
//!
//! Samples are generated from exact rational phases, so aliasing is exact:
//! f and f + k·fs give bit-identical sequences. Periodograms show the aliased
//! line; the arcsine transform turns well-mixed samples into uniform variates.

mod phase;
mod spectrum;
mod uniformity;

pub use phase::{ExactFrequency, PhaseAccumulator, SineSamplingSpec};
pub use spectrum::{periodogram, Periodogram, Window};
pub use uniformity::{arcsine_cdf, chi_square_uniformity, undersampled_uniform, UniformityReport, MIN_STEP_DENOMINATOR};

use rayon::prelude::*;

use crate::error::Result;

/// Samples per independently seeded chunk in parallel generation.
const CHUNK: usize = 1 << 16;

/// sin(2π·frac(phase0 + k·f/fs)) for k in 0..count, from exact phases.
pub fn sample_sine(spec: &SineSamplingSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let chunks: Vec<usize> = (0..spec.count).step_by(CHUNK).collect();
    let parts: Vec<Vec<f64>> = chunks
        .par_iter()
        .map(|&start| {
            let len = CHUNK.min(spec.count - start);
            let mut acc = PhaseAccumulator::at(spec, start as u64)?;
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                out.push(acc.sine());
                acc.advance();
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(parts.concat())
}

/// The same samples computed as sin(2π f t_k) in double precision. For
/// frequencies far above fs the argument carries no phase information and the
/// output is effectively noise.
pub fn sample_sine_naive(spec: &SineSamplingSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let f = spec.frequency.to_f64();
    let fs = spec.sample_rate as f64;
    let phase0 = spec.phase0.0 as f64 / spec.phase0.1 as f64;
    Ok((0..spec.count)
        .map(|k| (2.0 * std::f64::consts::PI * (phase0 + f * (k as f64 / fs))).sin())
        .collect())
}
