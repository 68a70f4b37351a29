//! Weighted power means over finite populations.
//!
//! A [`SentimentProfile`] pairs nonnegative per-group sentiment values with a
//! full-support probability weighting. [`power_mean`] evaluates
//!
//! ```text
//! M_p(S; w) = (Σ wᵢ Sᵢ^p)^(1/p)      p ∉ {0, ±∞}
//!           = exp(Σ wᵢ ln Sᵢ)         p = 0
//!           = min Sᵢ / max Sᵢ         p = −∞ / +∞
//! ```
//!
//! with zero entries for `p ≤ 0` resolved by the right limit, which is 0.
//! [`welfare`] and [`malfare`] wrap the same family with the fairness ranges
//! `p ≤ 1` and `p ≥ 1` respectively.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Above this magnitude finite `p` is evaluated as the min/max limit.
pub const LIMIT_SWITCH: f64 = 700.0;

/// Tolerance on the weight sum before renormalization is refused.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// A point on the extended real line, used as the power-mean exponent.
///
/// Variant order makes the derived `PartialOrd` agree with the order of the
/// extended reals.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum Power {
    NegInf,
    Finite(f64),
    PosInf,
}

impl Power {
    pub const ONE: Power = Power::Finite(1.0);

    /// Accepts `±∞` as the matching infinite variant; rejects NaN.
    pub fn from_f64(p: f64) -> Result<Power> {
        if p.is_nan() {
            Err(Error::InvalidArgument("p is NaN".into()))
        } else if p == f64::INFINITY {
            Ok(Power::PosInf)
        } else if p == f64::NEG_INFINITY {
            Ok(Power::NegInf)
        } else {
            Ok(Power::Finite(p))
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Power::NegInf => f64::NEG_INFINITY,
            Power::Finite(p) => p,
            Power::PosInf => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Power::Finite(_))
    }
}

impl fmt::Display for Power {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Power::NegInf => f.write_str("-inf"),
            Power::Finite(p) => write!(f, "{p}"),
            Power::PosInf => f.write_str("inf"),
        }
    }
}

impl FromStr for Power {
    type Err = Error;

    fn from_str(s: &str) -> Result<Power> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(Power::PosInf),
            "-inf" | "-infinity" => Ok(Power::NegInf),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("cannot parse p from {s:?}")))?;
                if !p.is_finite() {
                    return Err(Error::InvalidArgument(format!("cannot parse p from {s:?}")));
                }
                Ok(Power::Finite(p))
            }
        }
    }
}

impl Serialize for Power {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Power::Finite(p) => serializer.serialize_f64(*p),
            other => serializer.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Power {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Power, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(p) => Power::from_f64(p).map_err(serde::de::Error::custom),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Welfare,
    Malfare,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sense::Welfare => f.write_str("welfare"),
            Sense::Malfare => f.write_str("malfare"),
        }
    }
}

/// Exponent plus the direction of aggregation. A `fair` spec is restricted
/// to `p ≤ 1` for welfare and `p ≥ 1` for malfare.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSpec {
    pub p: Power,
    pub sense: Sense,
    pub fair: bool,
}

impl PowerSpec {
    pub fn malfare(p: Power) -> PowerSpec {
        PowerSpec {
            p,
            sense: Sense::Malfare,
            fair: false,
        }
    }

    pub fn welfare(p: Power) -> PowerSpec {
        PowerSpec {
            p,
            sense: Sense::Welfare,
            fair: false,
        }
    }

    pub fn fair_malfare(p: Power) -> Result<PowerSpec> {
        let spec = PowerSpec {
            p,
            sense: Sense::Malfare,
            fair: true,
        };
        spec.check_fair()?;
        Ok(spec)
    }

    pub fn fair_welfare(p: Power) -> Result<PowerSpec> {
        let spec = PowerSpec {
            p,
            sense: Sense::Welfare,
            fair: true,
        };
        spec.check_fair()?;
        Ok(spec)
    }

    fn check_fair(&self) -> Result<()> {
        if !self.fair {
            return Ok(());
        }
        let ok = match self.sense {
            Sense::Malfare => self.p >= Power::ONE,
            Sense::Welfare => self.p <= Power::ONE,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnfairPower {
                p: self.p,
                sense: self.sense,
            })
        }
    }
}

/// Nonnegative per-group sentiment values with a full-support weighting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SentimentProfile {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl SentimentProfile {
    /// Validates the profile. Weights summing to within
    /// [`WEIGHT_SUM_TOLERANCE`] of 1 are renormalized; anything further off is
    /// rejected.
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<SentimentProfile> {
        if values.is_empty() {
            return Err(Error::InvalidProfile(
                "at least one group is required".into(),
            ));
        }
        if values.len() != weights.len() {
            return Err(Error::InvalidProfile(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidProfile(format!(
                "values must be finite and nonnegative, got {v}"
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w <= 0.0) {
            return Err(Error::InvalidProfile(format!(
                "weights must be finite and positive, got {w}"
            )));
        }
        let weights = normalize_weights(weights)?;
        Ok(SentimentProfile { values, weights })
    }

    pub fn uniform(values: Vec<f64>) -> Result<SentimentProfile> {
        let g = values.len().max(1);
        SentimentProfile::new(values, vec![1.0 / g as f64; g])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same weights, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<SentimentProfile> {
        SentimentProfile::new(values, self.weights.clone())
    }
}

pub(crate) fn normalize_weights(weights: Vec<f64>) -> Result<Vec<f64>> {
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::InvalidProfile(format!(
            "weights sum to {sum}, expected 1"
        )));
    }
    Ok(weights.into_iter().map(|w| w / sum).collect())
}

/// Weighted power mean `M_p(S; w)`.
pub fn power_mean(profile: &SentimentProfile, p: Power) -> f64 {
    power_mean_slices(&profile.values, &profile.weights, p)
}

/// [`power_mean`] on raw slices that are already known to satisfy the
/// profile invariants.
pub(crate) fn power_mean_slices(values: &[f64], weights: &[f64], p: Power) -> f64 {
    let max = || values.iter().copied().fold(0.0, f64::max);
    let min = || values.iter().copied().fold(f64::INFINITY, f64::min);
    let p = match p {
        Power::PosInf => return max(),
        Power::NegInf => return min(),
        Power::Finite(p) => p,
    };
    if p > LIMIT_SWITCH {
        return max();
    }
    if p < -LIMIT_SWITCH {
        return min();
    }
    if p <= 0.0 && values.contains(&0.0) {
        return 0.0;
    }
    let (lo, hi) = (min(), max());
    if lo == hi {
        return lo;
    }
    // Rounding in the weights can push the sum a hair past the range.
    if p == 0.0 {
        let log_mean: f64 = values.iter().zip(weights).map(|(v, w)| w * v.ln()).sum();
        return log_mean.exp().clamp(lo, hi);
    }

    // Scale by the extreme value that keeps every ratio^p ≤ 1.
    let scale = if p > 0.0 { max() } else { min() };
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * (v / scale).powf(p))
        .sum();
    (scale * sum.powf(1.0 / p)).clamp(lo, hi)
}

pub fn malfare(profile: &SentimentProfile, spec: &PowerSpec) -> Result<f64> {
    if spec.sense != Sense::Malfare {
        return Err(Error::WrongSense {
            expected: Sense::Malfare,
            actual: spec.sense,
        });
    }
    spec.check_fair()?;
    Ok(power_mean(profile, spec.p))
}

pub fn welfare(profile: &SentimentProfile, spec: &PowerSpec) -> Result<f64> {
    if spec.sense != Sense::Welfare {
        return Err(Error::WrongSense {
            expected: Sense::Welfare,
            actual: spec.sense,
        });
    }
    spec.check_fair()?;
    Ok(power_mean(profile, spec.p))
}

/// Canonical additively separable form `Σ wᵢ f_p(Sᵢ)` with `f_0 = ln` and
/// `f_p(x) = sgn(p)·x^p`. Zero entries take the right limit, so the result is
/// `−∞` for `p ≤ 0` whenever some value is zero.
pub fn cas_mean(profile: &SentimentProfile, p: f64) -> Result<f64> {
    if !p.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "cas_mean needs a finite p, got {p}"
        )));
    }
    let values = &profile.values;
    let weights = &profile.weights;
    if p <= 0.0 && values.contains(&0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    let sum = if p == 0.0 {
        values.iter().zip(weights).map(|(v, w)| w * v.ln()).sum()
    } else {
        let s: f64 = values.iter().zip(weights).map(|(v, w)| w * v.powf(p)).sum();
        p.signum() * s
    };
    Ok(sum)
}

/// Relative round-trip tolerance used to detect non-invertible maps.
const ROUND_TRIP_TOLERANCE: f64 = 1e-9;

/// Kolmogorov mean `f⁻¹(Σ wᵢ f(Sᵢ))`.
///
/// `f` must be strictly monotone over the profile's values, and `f_inv` its
/// inverse; both are checked on the inputs.
pub fn generalized_f_mean<F, G>(profile: &SentimentProfile, f: F, f_inv: G) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mut mapped: Vec<(f64, f64)> = Vec::with_capacity(profile.len());
    for &x in &profile.values {
        let fx = f(x);
        let back = f_inv(fx);
        if !fx.is_finite() || (back - x).abs() > ROUND_TRIP_TOLERANCE * x.abs().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "f is not invertible at {x}: f_inv(f(x)) = {back}"
            )));
        }
        mapped.push((x, fx));
    }

    mapped.sort_by(|a, b| a.0.total_cmp(&b.0));
    mapped.dedup_by(|a, b| a.0 == b.0);
    let increasing = mapped.windows(2).all(|w| w[1].1 > w[0].1);
    let decreasing = mapped.windows(2).all(|w| w[1].1 < w[0].1);
    if !(increasing || decreasing) {
        return Err(Error::InvalidArgument(
            "f is not strictly monotone on the values".into(),
        ));
    }

    let mean: f64 = profile
        .values
        .iter()
        .zip(&profile.weights)
        .map(|(&x, w)| w * f(x))
        .sum();
    Ok(f_inv(mean))
}

/// `M_p(S + β; w) − β`. Tends to the utilitarian mean as `β → ∞`.
pub fn affine_shift_mean(profile: &SentimentProfile, p: Power, beta: f64) -> Result<f64> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "beta must be finite and ≥ 0, got {beta}"
        )));
    }
    if beta == 0.0 {
        return Ok(power_mean(profile, p));
    }
    let shifted = profile.with_values(profile.values.iter().map(|v| v + beta).collect())?;
    Ok(power_mean(&shifted, p) - beta)
}
