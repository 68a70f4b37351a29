//! Atkinson inequality index.

use serde::Serialize;

use crate::aggregator::{power_mean, Power, SentimentProfile};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AtkinsonIndex {
    pub value: f64,
    pub eps: f64,
    /// `eps` lies outside `[0, 1]`, where the index is not confined to `[0, 1]`.
    pub extended_range: bool,
}

/// `ATK_ε(S; w) = 1 − M_{1−ε}(S; w) / M_1(S; w)`.
pub fn atkinson_index(profile: &SentimentProfile, eps: f64) -> Result<AtkinsonIndex> {
    if !eps.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "eps must be finite, got {eps}"
        )));
    }
    let utilitarian = power_mean(profile, Power::ONE);
    if utilitarian == 0.0 {
        return Err(Error::InvalidProfile(
            "Atkinson index is undefined for an all-zero profile".into(),
        ));
    }
    let value = 1.0 - power_mean(profile, Power::Finite(1.0 - eps)) / utilitarian;
    Ok(AtkinsonIndex {
        value,
        eps,
        extended_range: !(0.0..=1.0).contains(&eps),
    })
}

/// Power-mean welfare recovered as `M_1 · (1 − ATK_{1−p})`.
pub fn welfare_via_atkinson(profile: &SentimentProfile, p: f64) -> Result<f64> {
    let utilitarian = power_mean(profile, Power::ONE);
    if utilitarian == 0.0 {
        return Ok(0.0);
    }
    let atk = atkinson_index(profile, 1.0 - p)?;
    Ok(utilitarian * (1.0 - atk.value))
}
