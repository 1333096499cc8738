//! Associated Laguerre polynomials by upward recurrence in the degree.

use crate::error::{Error, Result};

/// Rescaling threshold for the recurrence (2^±500).
const RESCALE_HIGH: f64 = 3.273390607896142e150;
const RESCALE_LOW: f64 = 1.0 / RESCALE_HIGH;

/// A value stored as `mantissa · e^{ln_scale}` to survive magnitudes outside
/// the f64 range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub ln_scale: f64,
}

impl Scaled {
    pub fn value(&self) -> f64 {
        if self.ln_scale == 0.0 || self.mantissa == 0.0 {
            return self.mantissa;
        }
        let scale = self.ln_scale.exp();
        if scale.is_finite() && scale > 0.0 {
            self.mantissa * scale
        } else {
            self.mantissa.signum() * self.ln_abs().exp()
        }
    }

    /// ln|value|, −∞ for zero.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.abs().ln() + self.ln_scale
    }

    pub fn signum(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }
}

fn check_domain(n: usize, k: i64, x: f64) -> Result<()> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::invalid(format!("Laguerre argument must be finite and >= 0, got {x}")));
    }
    if (n as i64) + k.min(0) < 0 {
        return Err(Error::invalid(format!("Laguerre order n + min(k, 0) must be >= 0 (n = {n}, k = {k})")));
    }
    Ok(())
}

/// L_n^k(x) with the running pair rescaled whenever it leaves [2^-500, 2^500].
///
/// Uses `(j+1) L_{j+1} = (2j + 1 + k − x) L_j − (j + k) L_{j−1}`, which is the
/// dominant-solution direction for x ≥ 0 and k ≥ 0. Negative orders go through
/// `L_n^{−m}(x) = (−x)^m (n−m)!/n! · L_{n−m}^{m}(x)`, since the recurrence
/// cancels catastrophically toward the small result there.
pub fn laguerre_assoc_scaled(n: usize, k: i64, x: f64) -> Result<Scaled> {
    check_domain(n, k, x)?;
    if k < 0 {
        let m = k.unsigned_abs() as usize;
        let inner = recurrence(n - m, m as i64, x);
        if x == 0.0 || inner.mantissa == 0.0 {
            return Ok(Scaled { mantissa: 0.0, ln_scale: 0.0 });
        }
        let ln_factor = m as f64 * x.ln() - (n - m + 1..=n).map(|j| (j as f64).ln()).sum::<f64>();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(Scaled { mantissa: sign * inner.mantissa, ln_scale: inner.ln_scale + ln_factor });
    }
    Ok(recurrence(n, k, x))
}

fn recurrence(n: usize, k: i64, x: f64) -> Scaled {
    let kf = k as f64;
    let mut prev = 1.0;
    if n == 0 {
        return Scaled { mantissa: prev, ln_scale: 0.0 };
    }
    let mut cur = 1.0 + kf - x;
    let mut ln_scale = 0.0;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + kf - x) * cur - (jf + kf) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > RESCALE_HIGH {
            prev *= RESCALE_LOW;
            cur *= RESCALE_LOW;
            ln_scale += RESCALE_HIGH.ln();
        } else if mag < RESCALE_LOW && mag > 0.0 {
            prev *= RESCALE_HIGH;
            cur *= RESCALE_HIGH;
            ln_scale -= RESCALE_HIGH.ln();
        }
    }
    Scaled { mantissa: cur, ln_scale }
}

/// Associated Laguerre polynomial L_n^k(x) for x ≥ 0 and n + min(k, 0) ≥ 0.
pub fn laguerre_assoc(n: usize, k: i64, x: f64) -> Result<f64> {
    let scaled = laguerre_assoc_scaled(n, k, x)?;
    let v = scaled.value();
    if !v.is_finite() {
        return Err(Error::Range(format!("L_{n}^{k}({x}) overflows f64")));
    }
    Ok(v)
}

/// Ordinary Laguerre polynomial L_n(x) = L_n^0(x).
pub fn laguerre(n: usize, x: f64) -> Result<f64> {
    laguerre_assoc(n, 0, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        for &k in &[0, 1, 3, 7] {
            for &x in &[0.0, 0.4, 5.0] {
                assert_eq!(laguerre_assoc(0, k, x).unwrap(), 1.0);
                let l1 = laguerre_assoc(1, k, x).unwrap();
                assert!((l1 - (1.0 + k as f64 - x)).abs() < 1e-15);
            }
        }
        assert_eq!(laguerre_assoc(1, 0, 2.0).unwrap(), -1.0);
    }

    #[test]
    fn cubic_with_unit_order() {
        // L_3^1(x) = 4 − 6x + 2x² − x³/6
        let x: f64 = 0.5;
        let explicit = 4.0 - 6.0 * x + 2.0 * x * x - x.powi(3) / 6.0;
        let v = laguerre_assoc(3, 1, x).unwrap();
        assert!((v - explicit).abs() < 1e-14);
        assert!((v - 1.4791666666666667).abs() < 1e-14);
    }

    #[test]
    fn domain_violations() {
        assert!(matches!(laguerre_assoc(2, -3, 1.0), Err(Error::InvalidInput(_))));
        assert!(matches!(laguerre_assoc(2, 0, -1.0), Err(Error::InvalidInput(_))));
        assert!(matches!(laguerre_assoc(2, 0, f64::INFINITY), Err(Error::InvalidInput(_))));
        // n + k = 0 is allowed: L_2^{-2}(x) = x²/2
        assert!((laguerre_assoc(2, -2, 3.0).unwrap() - 4.5).abs() < 1e-14);
    }

    #[test]
    fn huge_values_stay_representable_when_scaled() {
        let s = laguerre_assoc_scaled(400, 0, 1e9).unwrap();
        // leading term x^n / n! dominates for x ≫ n², next correction is n²/x
        let expected_ln: f64 = 400.0 * 1e9f64.ln() - (1..=400).map(|j| (j as f64).ln()).sum::<f64>();
        assert!((s.ln_abs() - expected_ln).abs() < 1e-3);
        assert_eq!(s.signum(), 1.0);
        assert!(matches!(laguerre_assoc(400, 0, 1e9), Err(Error::Range(_))));
    }
}
