//! One-sided power spectra of uniformly sampled real signals.

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Shortest record accepted by [`periodogram`].
pub const MIN_PERIODOGRAM_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Window {
    #[default]
    None,
    Hann,
}

impl Window {
    fn weights(self, n: usize) -> Vec<f64> {
        match self {
            Window::None => vec![1.0; n],
            Window::Hann => (0..n)
                .map(|k| {
                    let s = (std::f64::consts::PI * k as f64 / n as f64).sin();
                    s * s
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Periodogram {
    /// Bin frequencies k·fs/n for k = 0..=n/2.
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
    pub window: Window,
}

impl Periodogram {
    /// The strongest bin as `(index, frequency, power)`. Ties go to the lower bin.
    pub fn peak(&self) -> (usize, f64, f64) {
        let (k, p) = self
            .power
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, &p)| if p > best.1 { (k, p) } else { best });
        (k, self.freqs[k], p)
    }

    /// Peak power over the median bin power, in dB.
    pub fn peak_to_median_db(&self) -> f64 {
        let mut sorted = self.power.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[sorted.len() / 2];
        10.0 * (self.peak().2 / median).log10()
    }

    pub fn bin_width(&self) -> f64 {
        self.freqs.get(1).copied().unwrap_or(0.0)
    }
}

/// |X_k|² / (n·Σw²/n) for the windowed DFT, folded onto k = 0..=n/2 with the
/// interior bins doubled so the total equals the mean-square signal power.
pub fn periodogram(samples: &[f64], sample_rate: f64, window: Window) -> Result<Periodogram> {
    let n = samples.len();
    if n < MIN_PERIODOGRAM_SAMPLES {
        return Err(Error::invalid(format!("periodogram needs at least {MIN_PERIODOGRAM_SAMPLES} samples, got {n}")));
    }
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(Error::invalid("sample_rate must be positive"));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("samples must be finite"));
    }
    let w = window.weights(n);
    let mut buf: Vec<C64> = samples.iter().zip(&w).map(|(x, w)| C64::new(x * w, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let norm = n as f64 * w.iter().map(|w| w * w).sum::<f64>();
    let half = n / 2;
    let power = (0..=half)
        .map(|k| {
            let p = buf[k].norm_sqr() / norm;
            if k == 0 || (n % 2 == 0 && k == half) {
                p
            } else {
                2.0 * p
            }
        })
        .collect();
    let freqs = (0..=half).map(|k| k as f64 * sample_rate / n as f64).collect();
    Ok(Periodogram { freqs, power, window })
}
