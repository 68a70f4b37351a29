//! Plug-in malfare estimation and finite-sample confidence brackets.
//!
//! Per-group losses in `[0, r]` are averaged and aggregated with the power
//! mean. Any elementwise deviation vector `ε` that bounds `|Ŝᵢ − Sᵢ|` with
//! probability `1 − δ` brackets the true malfare as
//!
//! ```text
//! M_p(0 ∨ (Ŝ − ε); w) ≤ M_p(S; w) ≤ M_p(Ŝ + ε; w)
//! ```
//!
//! by monotonicity. `ε` comes from Hoeffding (`r·√(ln(2g/δ)/2m)`) or Bennett
//! (`r·ln(2g/δ)/3m + √(2·Varᵢ·ln(2g/δ)/m)`, per group).

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregator::{power_mean, Power, SentimentProfile};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMethod {
    Hoeffding,
    Bennett,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Variances {
    /// Known per-group variances of the loss.
    Known(Vec<f64>),
    /// Unbiased sample variances of the supplied losses. The resulting
    /// bracket is heuristic.
    Empirical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub method: BoundMethod,
    pub delta: f64,
    /// Smallest per-group sample count.
    pub m: usize,
    pub r: f64,
    pub epsilon_per_group: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub heuristic: bool,
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1), got {delta}"
        )))
    }
}

fn check_range(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "loss range r must be finite and ≥ 0, got {r}"
        )))
    }
}

fn group_means(samples: &[Vec<f64>]) -> Result<Vec<f64>> {
    samples
        .iter()
        .enumerate()
        .map(|(i, group)| {
            if group.is_empty() {
                return Err(Error::InvalidArgument(format!("group {i} has no samples")));
            }
            if let Some(v) = group.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "group {i} has a loss outside [0, ∞): {v}"
                )));
            }
            Ok(group.iter().sum::<f64>() / group.len() as f64)
        })
        .collect()
}

/// Power mean of per-group empirical mean losses.
pub fn plugin_malfare(samples: &[Vec<f64>], weights: &[f64], p: Power) -> Result<f64> {
    let means = group_means(samples)?;
    let profile = SentimentProfile::new(means, weights.to_vec())?;
    Ok(power_mean(&profile, p))
}

pub fn hoeffding_epsilon(r: f64, g: usize, delta: f64, m: usize) -> Result<f64> {
    check_range(r)?;
    check_delta(delta)?;
    if g == 0 || m == 0 {
        return Err(Error::InvalidArgument("g and m must be at least 1".into()));
    }
    let log_term = (2.0 * g as f64 / delta).ln();
    Ok(r * (log_term / (2.0 * m as f64)).sqrt())
}

pub fn bennett_epsilon(
    r: f64,
    g: usize,
    delta: f64,
    m: usize,
    variances: &[f64],
) -> Result<Vec<f64>> {
    check_range(r)?;
    check_delta(delta)?;
    if g == 0 || m == 0 {
        return Err(Error::InvalidArgument("g and m must be at least 1".into()));
    }
    if variances.len() != g {
        return Err(Error::InvalidArgument(format!(
            "expected {g} variances, got {}",
            variances.len()
        )));
    }
    for &v in variances {
        check_variance(v, r)?;
    }
    Ok(variances
        .iter()
        .map(|&v| bennett_term(r, g, delta, m, v))
        .collect())
}

fn check_variance(v: f64, r: f64) -> Result<()> {
    let cap = r * r / 4.0;
    if v >= 0.0 && v <= cap * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "variance {v} outside [0, r²/4 = {cap}]"
        )))
    }
}

fn bennett_term(r: f64, g: usize, delta: f64, m: usize, var: f64) -> f64 {
    let log_term = (2.0 * g as f64 / delta).ln();
    let m = m as f64;
    r * log_term / (3.0 * m) + (2.0 * var * log_term / m).sqrt()
}

/// Lower and upper malfare bounds for estimates `Ŝ` and deviations `ε`.
/// The lower arm clamps `Ŝ − ε` at zero elementwise.
pub fn bracket_from_estimates(
    estimates: &[f64],
    eps: &[f64],
    weights: &[f64],
    p: Power,
) -> Result<(f64, f64)> {
    if estimates.len() != eps.len() {
        return Err(Error::InvalidArgument(
            "estimates and epsilons differ in length".into(),
        ));
    }
    let lower: Vec<f64> = estimates
        .iter()
        .zip(eps)
        .map(|(s, e)| (s - e).max(0.0))
        .collect();
    let upper: Vec<f64> = estimates.iter().zip(eps).map(|(s, e)| s + e).collect();
    let lower = power_mean(&SentimentProfile::new(lower, weights.to_vec())?, p);
    let upper = power_mean(&SentimentProfile::new(upper, weights.to_vec())?, p);
    Ok((lower, upper))
}

fn sample_variance(group: &[f64]) -> f64 {
    let n = group.len();
    if n < 2 {
        return 0.0;
    }
    let mean = group.iter().sum::<f64>() / n as f64;
    group.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}

/// Plug-in estimate plus confidence bracket for fair malfare (`p ≥ 1`).
pub fn malfare_bracket(
    samples: &[Vec<f64>],
    weights: &[f64],
    p: Power,
    method: BoundMethod,
    delta: f64,
    r: f64,
    variances: Option<&Variances>,
) -> Result<BoundReport> {
    if p < Power::ONE {
        return Err(Error::InvalidArgument(format!(
            "brackets need fair malfare with p ≥ 1, got p = {p}"
        )));
    }
    check_range(r)?;
    check_delta(delta)?;
    let estimates = group_means(samples)?;
    for (i, group) in samples.iter().enumerate() {
        if let Some(v) = group.iter().find(|v| **v > r) {
            return Err(Error::InvalidArgument(format!(
                "group {i} has loss {v} above the range bound r = {r}"
            )));
        }
    }
    let g = samples.len();

    let mut heuristic = false;
    let epsilon_per_group = match method {
        BoundMethod::Hoeffding => samples
            .iter()
            .map(|group| hoeffding_epsilon(r, g, delta, group.len()))
            .collect::<Result<Vec<_>>>()?,
        BoundMethod::Bennett => {
            let vars = match variances {
                None => {
                    return Err(Error::InvalidArgument(
                        "the Bennett bound needs per-group variances".into(),
                    ))
                }
                Some(Variances::Known(v)) => v.clone(),
                Some(Variances::Empirical) => {
                    heuristic = true;
                    let cap = r * r / 4.0;
                    samples
                        .iter()
                        .map(|s| sample_variance(s).min(cap))
                        .collect()
                }
            };
            if vars.len() != g {
                return Err(Error::InvalidArgument(format!(
                    "expected {g} variances, got {}",
                    vars.len()
                )));
            }
            for &v in &vars {
                check_variance(v, r)?;
            }
            samples
                .iter()
                .zip(&vars)
                .map(|(group, &var)| bennett_term(r, g, delta, group.len(), var))
                .collect()
        }
    };

    let profile = SentimentProfile::new(estimates.clone(), weights.to_vec())?;
    let estimate = power_mean(&profile, p);
    let (lower, upper) =
        bracket_from_estimates(&estimates, &epsilon_per_group, profile.weights(), p)?;
    Ok(BoundReport {
        estimate,
        lower,
        upper,
        method,
        delta,
        m: samples.iter().map(Vec::len).min().unwrap_or(0),
        r,
        epsilon_per_group,
        seed: None,
        heuristic,
    })
}

/// Uniform-convergence sample size over `g` groups,
/// `⌈8‖ℓ‖∞² ln((2g/δ)^{1/4} · 𝔑(ε/4)) / ε²⌉`, with `ln 𝔑(γ)` supplied by the
/// caller.
pub fn uc_sample_complexity<F>(
    ell_inf: f64,
    g: usize,
    delta: f64,
    eps: f64,
    log_covering: F,
) -> Result<u64>
where
    F: Fn(f64) -> f64,
{
    check_delta(delta)?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {eps}"
        )));
    }
    if !(ell_inf > 0.0) || !ell_inf.is_finite() || g == 0 {
        return Err(Error::InvalidArgument("need ‖ℓ‖∞ > 0 and g ≥ 1".into()));
    }
    let log_cover = log_covering(eps / 4.0);
    if !(log_cover >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ln 𝔑 must be ≥ 0, got {log_cover}"
        )));
    }
    let log_term = 0.25 * (2.0 * g as f64 / delta).ln() + log_cover;
    let m = 8.0 * ell_inf * ell_inf * log_term / (eps * eps);
    Ok(m.ceil() as u64)
}

/// Smallest `m` with `(1 − p_bias)^m ≤ δ`: the sample size below which an
/// all-zero Bernoulli sample cannot be ruled out at confidence `δ`.
pub fn nsw_hardness_bound(p_bias: f64, delta: f64) -> Result<u64> {
    if !(p_bias > 0.0 && p_bias <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "p_bias must lie in (0, 1], got {p_bias}"
        )));
    }
    check_delta(delta)?;
    let q = 1.0 - p_bias;
    let holds = |m: u64| q.powi(m as i32) <= delta;
    let mut m = (delta.ln() / q.ln()).ceil().max(1.0) as u64;
    while m > 1 && holds(m - 1) {
        m -= 1;
    }
    while !holds(m) {
        m += 1;
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardnessSimulation {
    pub p_bias: f64,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    /// Fraction of trials whose group-2 sample was all zeros.
    pub all_zero_fraction: f64,
    /// `(1 − p_bias)^m`.
    pub expected: f64,
    /// Weight on the Bernoulli(p_bias) group.
    pub group_weight: f64,
    /// Nash welfare `p_bias^w` of the two-group population.
    pub nash_welfare: f64,
}

/// Monte-Carlo estimate of how often `m` Bernoulli(`p_bias`) draws are all
/// zero. Group 1 is the constant Bernoulli(1) group.
pub fn nsw_hardness_simulate(
    p_bias: f64,
    m: usize,
    trials: usize,
    seed: u64,
    group_weight: f64,
) -> Result<HardnessSimulation> {
    if !(0.0..=1.0).contains(&p_bias) {
        return Err(Error::InvalidArgument(format!(
            "p_bias must lie in [0, 1], got {p_bias}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if !(group_weight > 0.0 && group_weight < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "group weight must lie in (0, 1), got {group_weight}"
        )));
    }
    let zeros: usize = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t);
            let all_zero = (0..m).all(|_| rng.random::<f64>() >= p_bias);
            usize::from(all_zero)
        })
        .sum();
    Ok(HardnessSimulation {
        p_bias,
        m,
        trials,
        seed,
        all_zero_fraction: zeros as f64 / trials as f64,
        expected: (1.0 - p_bias).powi(m as i32),
        group_weight,
        nash_welfare: p_bias.powf(group_weight),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageRow {
    pub p: Power,
    pub true_malfare: f64,
    pub covered: usize,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageReport {
    pub means: Vec<f64>,
    pub m: usize,
    pub delta: f64,
    pub seed: u64,
    pub rows: Vec<CoverageRow>,
    /// Trials in which every `Ŝᵢ > εᵢ`, so the lower clamp was inactive.
    pub clamp_free_trials: usize,
}

/// Draws `m` Bernoulli(`meansᵢ`) losses per group, `trials` times, and counts
/// how often the Hoeffding bracket contains the true malfare for each `p`.
/// All `p` share the same draws.
pub fn simulate_bracket_coverage(
    means: &[f64],
    weights: &[f64],
    m: usize,
    delta: f64,
    ps: &[Power],
    trials: usize,
    seed: u64,
) -> Result<CoverageReport> {
    let truth = SentimentProfile::new(means.to_vec(), weights.to_vec())?;
    if means.iter().any(|&q| q > 1.0) {
        return Err(Error::InvalidArgument(
            "Bernoulli means must lie in [0, 1]".into(),
        ));
    }
    let per_trial: Vec<Result<(Vec<bool>, bool)>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t);
            let samples: Vec<Vec<f64>> = means
                .iter()
                .map(|&q| {
                    (0..m)
                        .map(|_| f64::from(u8::from(rng.random::<f64>() < q)))
                        .collect()
                })
                .collect();
            let mut hits = Vec::with_capacity(ps.len());
            let mut clamp_free = true;
            for &p in ps {
                let report = malfare_bracket(
                    &samples,
                    truth.weights(),
                    p,
                    BoundMethod::Hoeffding,
                    delta,
                    1.0,
                    None,
                )?;
                let target = power_mean(&truth, p);
                hits.push(report.lower <= target && target <= report.upper);
                let est = group_means(&samples)?;
                clamp_free &= est
                    .iter()
                    .zip(&report.epsilon_per_group)
                    .all(|(s, e)| s > e);
            }
            Ok((hits, clamp_free))
        })
        .collect();

    let mut rows: Vec<CoverageRow> = ps
        .iter()
        .map(|&p| CoverageRow {
            p,
            true_malfare: power_mean(&truth, p),
            covered: 0,
            trials,
        })
        .collect();
    let mut clamp_free_trials = 0;
    for trial in per_trial {
        let (hits, clamp_free) = trial?;
        for (row, hit) in rows.iter_mut().zip(hits) {
            row.covered += usize::from(hit);
        }
        clamp_free_trials += usize::from(clamp_free);
    }
    Ok(CoverageReport {
        means: means.to_vec(),
        m,
        delta,
        seed,
        rows,
        clamp_free_trials,
    })
}
