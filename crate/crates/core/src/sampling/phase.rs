//! Exact rational phase accumulation for sampled sinusoids.
//!
//! The phase of sample k is frac(phase0 + k·f/fs) in turns. With f up to
//! 10⁴³ Hz a floating product k·f is meaningless, so the step is reduced
//! modulo 1 in integer arithmetic and accumulated as a numerator over a fixed
//! common denominator.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Non-negative rational frequency in Hz, kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactFrequency {
    num: BigUint,
    den: BigUint,
}

impl ExactFrequency {
    pub fn new(num: BigUint, den: BigUint) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::invalid("frequency denominator must be positive"));
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_zero() { (num, den) } else { (num / &g, den / &g) };
        let den = if num.is_zero() { BigUint::one() } else { den };
        Ok(Self { num, den })
    }

    pub fn hz(value: u64) -> Self {
        Self { num: BigUint::from(value), den: BigUint::one() }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }

    /// Adds an integer number of Hz.
    pub fn plus_hz(&self, hz: &BigUint) -> Self {
        Self { num: &self.num + hz * &self.den, den: self.den.clone() }
    }

    /// Nearest f64 (for the floating-point comparison pipeline).
    pub fn to_f64(&self) -> f64 {
        self.num.to_f64().unwrap_or(f64::INFINITY) / self.den.to_f64().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for ExactFrequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Parses `"123"`, `"p/q"`, `"1e43"` and `"1e43+7919"` exactly.
impl FromStr for ExactFrequency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::invalid(format!("cannot parse exact frequency '{s}'"));
        let int = |t: &str| -> Result<BigUint> {
            let t = t.trim();
            if let Some((mant, exp)) = t.split_once(['e', 'E']) {
                let mant: BigUint = mant.trim().parse().map_err(|_| bad())?;
                let exp: u32 = exp.trim().parse().map_err(|_| bad())?;
                Ok(mant * BigUint::from(10u32).pow(exp))
            } else {
                t.parse().map_err(|_| bad())
            }
        };
        if let Some((n, d)) = s.split_once('/') {
            return Self::new(int(n)?, int(d)?);
        }
        let total = s.split('+').map(int).try_fold(BigUint::zero(), |acc, v| v.map(|v| acc + v))?;
        Self::new(total, BigUint::one())
    }
}

impl Serialize for ExactFrequency {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactFrequency {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(u64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(v) => Ok(ExactFrequency::hz(v)),
        }
    }
}

/// A sampled sinusoid sin(2π(phase0 + f·k/fs)), k = 0..count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SineSamplingSpec {
    pub frequency: ExactFrequency,
    pub sample_rate: u64,
    pub count: usize,
    /// Initial phase as (numerator, denominator) turns in [0, 1).
    #[serde(default = "SineSamplingSpec::zero_phase")]
    pub phase0: (u64, u64),
}

impl SineSamplingSpec {
    fn zero_phase() -> (u64, u64) {
        (0, 1)
    }

    pub fn new(frequency: ExactFrequency, sample_rate: u64, count: usize) -> Self {
        Self { frequency, sample_rate, count, phase0: (0, 1) }
    }

    pub fn with_phase0(self, num: u64, den: u64) -> Self {
        Self { phase0: (num, den), ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_rate == 0 {
            return Err(Error::invalid("sample_rate must be positive"));
        }
        if self.count == 0 {
            return Err(Error::invalid("count must be at least 1"));
        }
        let (p, q) = self.phase0;
        if q == 0 || p >= q {
            return Err(Error::invalid(format!("phase0 {p}/{q} must lie in [0, 1)")));
        }
        Ok(())
    }

    /// frac(f/fs) in lowest terms.
    pub fn step_turns(&self) -> (BigUint, BigUint) {
        let den = self.frequency.den() * BigUint::from(self.sample_rate);
        let num = self.frequency.num() % &den;
        reduce(num, den)
    }
}

fn reduce(num: BigUint, den: BigUint) -> (BigUint, BigUint) {
    if num.is_zero() {
        return (num, BigUint::one());
    }
    let g = num.gcd(&den);
    (num / &g, den / g)
}

#[derive(Debug, Clone)]
enum Counter {
    /// Common denominator fits in u64, so numerator + step fits in u128.
    Small { num: u128, step: u128, den: u128 },
    Big { num: BigUint, step: BigUint, den: BigUint },
}

/// Iterator over exact sample phases `num/den` in [0, 1).
#[derive(Debug, Clone)]
pub struct PhaseAccumulator {
    counter: Counter,
}

impl PhaseAccumulator {
    /// Accumulator positioned at sample `start`.
    pub fn at(spec: &SineSamplingSpec, start: u64) -> Result<Self> {
        spec.validate()?;
        let (step_num, step_den) = spec.step_turns();
        let (p0, q0) = reduce(BigUint::from(spec.phase0.0), BigUint::from(spec.phase0.1));
        let den = step_den.lcm(&q0);
        let step = step_num * (&den / &step_den);
        let num = (p0 * (&den / &q0) + &step * BigUint::from(start)) % &den;
        let counter = match (den.to_u64(), num.to_u128(), step.to_u128()) {
            (Some(d), Some(n), Some(s)) => Counter::Small { num: n, step: s, den: d as u128 },
            _ => Counter::Big { num, step, den },
        };
        Ok(Self { counter })
    }

    pub fn new(spec: &SineSamplingSpec) -> Result<Self> {
        Self::at(spec, 0)
    }

    /// Current phase as exact (numerator, denominator).
    pub fn phase(&self) -> (BigUint, BigUint) {
        match &self.counter {
            Counter::Small { num, den, .. } => (BigUint::from(*num), BigUint::from(*den)),
            Counter::Big { num, den, .. } => (num.clone(), den.clone()),
        }
    }

    pub fn advance(&mut self) {
        match &mut self.counter {
            Counter::Small { num, step, den } => {
                *num += *step;
                if *num >= *den {
                    *num -= *den;
                }
            }
            Counter::Big { num, step, den } => {
                *num += &*step;
                if *num >= *den {
                    *num -= &*den;
                }
            }
        }
    }

    /// sin(2π·phase) of the current sample.
    pub fn sine(&self) -> f64 {
        match &self.counter {
            Counter::Small { num, den, .. } => {
                let quarter = 4 * num / den;
                let rem = 4 * num % den;
                quadrant_sine(quarter as u8, rem as f64 / *den as f64)
            }
            Counter::Big { num, den, .. } => {
                let (quarter, rem) = (num * 4u32).div_rem(den);
                let frac = rem.to_f64().unwrap_or(0.0) / den.to_f64().unwrap_or(f64::INFINITY);
                quadrant_sine(quarter.to_u8().unwrap_or(0), frac)
            }
        }
    }
}

/// sin(2π(q + r)/4) for quadrant q ∈ 0..4 and r ∈ [0, 1); exact at the
/// quadrant boundaries.
fn quadrant_sine(q: u8, r: f64) -> f64 {
    let a = std::f64::consts::FRAC_PI_2 * r;
    match q {
        0 => a.sin(),
        1 => a.cos(),
        2 => -a.sin(),
        _ => -a.cos(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pow10(e: u32) -> BigUint {
        BigUint::from(10u32).pow(e)
    }

    #[test]
    fn parses_exact_frequencies() {
        let f: ExactFrequency = "1e43+7919".parse().unwrap();
        assert_eq!(f.num(), &(pow10(43) + BigUint::from(7919u32)));
        let r: ExactFrequency = "6/4".parse().unwrap();
        assert_eq!((r.num(), r.den()), (&BigUint::from(3u32), &BigUint::from(2u32)));
        assert!("abc".parse::<ExactFrequency>().is_err());
        assert!("1/0".parse::<ExactFrequency>().is_err());
        assert_eq!("100000".parse::<ExactFrequency>().unwrap(), ExactFrequency::hz(100_000));
    }

    #[test]
    fn step_reduces_modulo_one() {
        let spec = SineSamplingSpec::new(ExactFrequency::new(pow10(43), BigUint::one()).unwrap(), 1_000_000, 4);
        assert_eq!(spec.step_turns(), (BigUint::zero(), BigUint::one()));
        let spec = SineSamplingSpec::new("1e43+7".parse().unwrap(), 1_000_000, 4);
        assert_eq!(spec.step_turns(), (BigUint::from(7u32), pow10(6)));
    }

    #[test]
    fn quarter_rate_cycle_is_exact() {
        let spec = SineSamplingSpec::new(ExactFrequency::hz(250), 1000, 8);
        let mut acc = PhaseAccumulator::new(&spec).unwrap();
        let mut out = Vec::new();
        for _ in 0..8 {
            out.push(acc.sine());
            acc.advance();
        }
        assert_eq!(out, vec![0.0, 1.0, -0.0, -1.0, 0.0, 1.0, -0.0, -1.0]);
    }

    #[test]
    fn big_denominators_use_the_wide_counter() {
        let f = ExactFrequency::new(BigUint::one(), pow10(30) + BigUint::one()).unwrap();
        let spec = SineSamplingSpec::new(f, 3, 10);
        let mut acc = PhaseAccumulator::new(&spec).unwrap();
        assert!(matches!(acc.counter, Counter::Big { .. }));
        acc.advance();
        let (n, d) = acc.phase();
        assert_eq!((n, d), (BigUint::one(), (pow10(30) + BigUint::one()) * BigUint::from(3u32)));
    }

    #[test]
    fn invalid_specs() {
        let base = SineSamplingSpec::new(ExactFrequency::hz(1), 10, 5);
        assert!(PhaseAccumulator::new(&SineSamplingSpec { sample_rate: 0, ..base.clone() }).is_err());
        assert!(PhaseAccumulator::new(&SineSamplingSpec { count: 0, ..base.clone() }).is_err());
        assert!(PhaseAccumulator::new(&base.with_phase0(3, 3)).is_err());
    }
}
