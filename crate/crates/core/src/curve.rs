use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where the values of a [`FidelityCurve`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveSource {
    ExactPropagation,
    AnalyticFormula,
    GaussianModel,
}

/// Survival probability F(t) = |⟨φ|e^{−iHt}|φ⟩|² sampled on an ascending grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub source: CurveSource,
    pub params_label: String,
}

/// Values within this distance outside [0, 1] are treated as round-off.
const CLAMP_SLACK: f64 = 1e-12;

impl FidelityCurve {
    /// Validates the grid and clamps values into [0, 1]. Values further than
    /// 1e-12 outside that interval are rejected.
    pub fn new(times: Vec<f64>, values: Vec<f64>, source: CurveSource, params_label: impl Into<String>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::invalid("times and values differ in length"));
        }
        if times.is_empty() {
            return Err(Error::invalid("empty fidelity curve"));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("times must be finite and strictly ascending"));
        }
        let mut clamped = Vec::with_capacity(values.len());
        for v in values {
            if !(v >= -CLAMP_SLACK && v <= 1.0 + CLAMP_SLACK) {
                return Err(Error::Range(format!("fidelity value {v} outside [0, 1]")));
            }
            clamped.push(v.clamp(0.0, 1.0));
        }
        Ok(Self { times, values: clamped, source, params_label: params_label.into() })
    }

    /// Samples `f` on `times`.
    pub fn from_fn(times: Vec<f64>, source: CurveSource, label: impl Into<String>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values, source, label)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `points` evenly spaced samples from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (points - 1) as f64;
            (0..points).map(|k| if k == points - 1 { stop } else { start + step * k as f64 }).collect()
        }
    }
}
