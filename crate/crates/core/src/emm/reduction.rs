use serde::{Deserialize, Serialize};

use crate::dataset::GroupedDataset;
use crate::error::{Error, Result};
use crate::losses::{group_risks, LinearModel, LossKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixOutcome {
    pub model: LinearModel,
    /// Tolerance handed to the single-group trainer, `ε/g`.
    pub inner_epsilon: f64,
    pub pooled_size: usize,
    /// False when groups had unequal sizes and were cycled up to the largest.
    pub exact_mixture: bool,
    pub group_risks: Vec<f64>,
    pub max_group_risk: f64,
    /// Whether every group risk came out at most `ε`. Joint realizability is
    /// the caller's claim; without it the output carries no guarantee.
    pub realizability_verified: bool,
}

/// Row indices of the uniform group mixture: each group's rows, cycled up to
/// the largest group size so every group contributes equally.
pub fn mixture_indices(data: &GroupedDataset) -> (Vec<usize>, bool) {
    let members = data.members();
    let largest = members.iter().map(Vec::len).max().unwrap_or(0);
    let exact = members.iter().all(|m| m.len() == largest);
    let mut out = Vec::with_capacity(largest * members.len());
    for rows in members {
        out.extend(rows.iter().cycle().take(largest));
    }
    (out, exact)
}

/// Trains on the pooled uniform mixture of all groups at tolerance `ε/g`
/// with a single-group `trainer(pooled, ε', δ)`.
pub fn realizable_mix_train<F>(
    data: &GroupedDataset,
    kind: LossKind,
    epsilon: f64,
    delta: f64,
    trainer: F,
) -> Result<MixOutcome>
where
    F: FnOnce(&GroupedDataset, f64, f64) -> Result<LinearModel>,
{
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if let Some(k) = data.members().iter().position(Vec::is_empty) {
        return Err(Error::Dataset(format!(
            "group {:?} has no rows",
            data.group_names()[k]
        )));
    }
    let g = data.n_groups();
    let (indices, exact_mixture) = mixture_indices(data);
    let pooled = data.pooled(&indices, "mixture")?;
    let inner_epsilon = epsilon / g as f64;
    let model = trainer(&pooled, inner_epsilon, delta)?;
    let risks = group_risks(&model.theta, data, kind, false)?.per_group;
    let max_group_risk = risks.iter().copied().fold(0.0, f64::max);
    Ok(MixOutcome {
        model,
        inner_epsilon,
        pooled_size: pooled.len(),
        exact_mixture,
        realizability_verified: max_group_risk <= epsilon,
        group_risks: risks,
        max_group_risk,
    })
}
