//! Gaussian widths, power-law exponents and recurrence peaks of fidelity curves.

use serde::{Deserialize, Serialize};

use crate::curve::FidelityCurve;
use crate::error::{Error, Result};

/// Points with F at or below this level are excluded from Gaussian fits:
/// −ln F amplifies propagation noise there.
pub const FIT_FLOOR: f64 = 0.05;
const MIN_FIT_POINTS: usize = 10;
/// A local maximum counts as a recurrence only at this height or above.
pub const PEAK_THRESHOLD: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub sigma: f64,
    /// Root-mean-square residual of −ln F.
    pub rmse: f64,
    pub points: usize,
}

/// Least squares for −ln F = σ² t² over samples with F > 0.05.
pub fn fit_gaussian(curve: &FidelityCurve) -> Result<GaussianFit> {
    let usable: Vec<(f64, f64)> = curve
        .times
        .iter()
        .zip(&curve.values)
        .filter(|(_, &f)| f > FIT_FLOOR && f <= 1.0)
        .map(|(&t, &f)| (t * t, -f.ln()))
        .collect();
    if usable.len() < MIN_FIT_POINTS {
        return Err(Error::invalid(format!(
            "Gaussian fit needs at least {MIN_FIT_POINTS} points with F > {FIT_FLOOR}, found {}",
            usable.len()
        )));
    }
    let sxy: f64 = usable.iter().map(|(x, y)| x * y).sum();
    let sxx: f64 = usable.iter().map(|(x, _)| x * x).sum();
    if !(sxx > 0.0 && sxy > 0.0) {
        return Err(Error::invalid("curve shows no decay to fit"));
    }
    let sigma_sq = sxy / sxx;
    let rmse = (usable.iter().map(|(x, y)| (y - sigma_sq * x).powi(2)).sum::<f64>() / usable.len() as f64).sqrt();
    Ok(GaussianFit { sigma: sigma_sq.sqrt(), rmse, points: usable.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub intercept: f64,
    /// Standard error of the exponent; zero when only two points are given.
    pub stderr: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of ln σ against ln N.
pub fn loglog_slope(n_values: &[f64], sigma_values: &[f64]) -> Result<PowerLawFit> {
    if n_values.len() != sigma_values.len() || n_values.len() < 2 {
        return Err(Error::invalid("power-law fit needs at least two matching (N, sigma) pairs"));
    }
    if n_values.iter().chain(sigma_values).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::invalid("power-law fit needs positive finite N and sigma"));
    }
    let xs: Vec<f64> = n_values.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = sigma_values.iter().map(|v| v.ln()).collect();
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("power-law fit needs at least two distinct N"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - exponent * x).powi(2)).sum();
    let sst: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let stderr = if xs.len() > 2 { (ssr / (len - 2.0) / sxx).sqrt() } else { 0.0 };
    let r_squared = if sst > 0.0 { (1.0 - ssr / sst).clamp(0.0, 1.0) } else { 1.0 };
    Ok(PowerLawFit { exponent, intercept, stderr, r_squared })
}

/// Fitted widths across a sweep of N and their power law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub n_values: Vec<usize>,
    pub sigma_fit: Vec<f64>,
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub r_squared: f64,
}

impl ScalingReport {
    pub fn from_sigmas(n_values: &[usize], sigma_fit: &[f64]) -> Result<Self> {
        let ns: Vec<f64> = n_values.iter().map(|&n| n as f64).collect();
        let fit = loglog_slope(&ns, sigma_fit)?;
        Ok(Self {
            n_values: n_values.to_vec(),
            sigma_fit: sigma_fit.to_vec(),
            exponent: fit.exponent,
            exponent_stderr: fit.stderr,
            r_squared: fit.r_squared,
        })
    }

    /// Fits every curve and the resulting power law.
    pub fn from_curves(n_values: &[usize], curves: &[FidelityCurve]) -> Result<Self> {
        if n_values.len() != curves.len() {
            return Err(Error::invalid("one curve per N is required"));
        }
        let sigmas: Vec<f64> = curves.iter().map(|c| fit_gaussian(c).map(|f| f.sigma)).collect::<Result<_>>()?;
        Self::from_sigmas(n_values, &sigmas)
    }
}

/// Linear-interpolated crossing of `level` between samples `a` and `b`.
fn crossing(curve: &FidelityCurve, a: usize, b: usize, level: f64) -> f64 {
    let (ta, tb) = (curve.times[a], curve.times[b]);
    let (fa, fb) = (curve.values[a], curve.values[b]);
    ta + (level - fa) * (tb - ta) / (fb - fa)
}

/// Full width at half maximum of the peak at `index`. A peak at the first
/// sample with t = 0 is mirrored, since fidelity is even in time.
pub fn peak_width(curve: &FidelityCurve, index: usize) -> Option<f64> {
    let half = 0.5 * curve.values[index];
    let right = (index + 1..curve.len())
        .find(|&j| curve.values[j] < half)
        .map(|j| crossing(curve, j - 1, j, half))?;
    let left = match (0..index).rev().find(|&j| curve.values[j] < half) {
        Some(j) => crossing(curve, j, j + 1, half),
        None if index == 0 && curve.times[0] == 0.0 => -right,
        None => return None,
    };
    Some(right - left)
}

/// FWHM of the highest peak (first one on ties), which must reach 0.99.
pub fn fwhm(curve: &FidelityCurve) -> Result<f64> {
    let (index, &height) = curve
        .values
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    if height < PEAK_THRESHOLD {
        return Err(Error::invalid(format!("no peak reaches {PEAK_THRESHOLD} (maximum {height})")));
    }
    peak_width(curve, index)
        .ok_or_else(|| Error::invalid("peak is not bracketed by values below half maximum"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub time: f64,
    pub height: f64,
    pub width: Option<f64>,
    /// Nearest k with t ≈ 2πk/ω.
    pub revival_index: i64,
    /// time − 2πk/ω
    pub offset: f64,
}

/// Local maxima reaching 0.99. Maxima closer than half a period π/ω are
/// merged, keeping the higher one.
pub fn recurrence_peaks(curve: &FidelityCurve, omega: f64) -> Result<Vec<Peak>> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid("omega must be positive"));
    }
    let v = &curve.values;
    let last = v.len() - 1;
    let period = 2.0 * std::f64::consts::PI / omega;
    let mut peaks: Vec<(usize, f64)> = Vec::new();
    for i in 0..=last {
        let rises = i == 0 || v[i] >= v[i - 1];
        let falls = i == last || v[i] > v[i + 1];
        if v[i] < PEAK_THRESHOLD || !rises || !falls {
            continue;
        }
        match peaks.last_mut() {
            Some(prev) if curve.times[i] - curve.times[prev.0] < 0.5 * period => {
                if v[i] > prev.1 {
                    *prev = (i, v[i]);
                }
            }
            _ => peaks.push((i, v[i])),
        }
    }
    Ok(peaks
        .into_iter()
        .map(|(i, height)| {
            let time = curve.times[i];
            let revival_index = (time / period).round() as i64;
            Peak { time, height, width: peak_width(curve, i), revival_index, offset: time - revival_index as f64 * period }
        })
        .collect())
}
