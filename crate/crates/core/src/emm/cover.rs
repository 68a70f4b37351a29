use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::aggregator::{power_mean_slices, Power, SentimentProfile};
use crate::dataset::GroupedDataset;
use crate::error::{Error, Result};
use crate::estimation::uc_sample_complexity;
use crate::losses::{loss_value, LossKind};

/// Axis-aligned threshold classifier: predicts `direction` when
/// `x[feature] > threshold` and `−direction` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    pub direction: i8,
}

impl Stump {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let d = f64::from(self.direction);
        if x[self.feature] > self.threshold {
            d
        } else {
            -d
        }
    }

    /// Labels of the (below-or-at, above) leaves.
    pub fn leaf_labels(&self) -> (f64, f64) {
        let d = f64::from(self.direction);
        (-d, d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StumpCover {
    pub stumps: Vec<Stump>,
    pub gamma: f64,
}

impl StumpCover {
    pub fn len(&self) -> usize {
        self.stumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stumps.is_empty()
    }
}

/// Candidate thresholds for one column: one below the minimum, the midpoints
/// of consecutive distinct values and one above the maximum. A constant
/// column only gets the one below.
fn thresholds(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values.dedup();
    let lo = values[0];
    let hi = values[values.len() - 1];
    let mut out = vec![lo - (1.0 + lo.abs())];
    if values.len() > 1 {
        out.extend(values.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2.0));
        out.push(hi + 1.0 + hi.abs());
    }
    out
}

fn column<'a>(
    data: &'a GroupedDataset,
    rows: &'a [usize],
    j: usize,
) -> impl Iterator<Item = f64> + 'a {
    rows.iter().map(move |&i| data.row(i)[j])
}

/// Every stump that labels the given rows differently, ordered by feature,
/// then threshold, then direction (`+1` first).
fn enumerate_on(data: &GroupedDataset, rows: &[usize], gamma: f64) -> Result<StumpCover> {
    if !(gamma >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cover resolution must be nonnegative, got {gamma}"
        )));
    }
    if rows.is_empty() || data.n_features() == 0 {
        return Err(Error::Dataset(
            "stump cover needs at least one row and one feature".into(),
        ));
    }
    let mut stumps = Vec::new();
    for j in 0..data.n_features() {
        for threshold in thresholds(column(data, rows, j).collect()) {
            for direction in [1, -1] {
                stumps.push(Stump {
                    feature: j,
                    threshold,
                    direction,
                });
            }
        }
    }
    Ok(StumpCover { stumps, gamma })
}

/// Exact cover of the stump class on the concatenated sample, hence a valid
/// `γ`-cover for any `γ ≥ 0`.
pub fn enumerate_stump_cover(data: &GroupedDataset, gamma: f64) -> Result<StumpCover> {
    let all: Vec<usize> = (0..data.len()).collect();
    enumerate_on(data, &all, gamma)
}

/// Number of distinct stumps in the union of the per-group covers.
pub fn union_cover_size(data: &GroupedDataset) -> Result<usize> {
    let mut seen = BTreeSet::new();
    for rows in data.members().iter().filter(|r| !r.is_empty()) {
        for s in enumerate_on(data, rows, 0.0)?.stumps {
            seen.insert((s.feature, s.threshold.to_bits(), s.direction));
        }
    }
    Ok(seen.len())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverConfig {
    pub kind: LossKind,
    pub p: Power,
    pub weights: Vec<f64>,
    pub epsilon: f64,
    pub delta: f64,
    pub bias_weighting: bool,
}

impl CoverConfig {
    pub fn zero_one(data: &GroupedDataset, p: Power, epsilon: f64, delta: f64) -> CoverConfig {
        CoverConfig {
            kind: LossKind::ZeroOne,
            p,
            weights: data.group_weights().to_vec(),
            epsilon,
            delta,
            bias_weighting: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub objective: f64,
    pub group_risks: Vec<f64>,
    /// `ε/(3√g)`.
    pub gamma: f64,
    pub cover_size: usize,
    pub union_cover_size: usize,
    /// Uniform-convergence sample size at accuracy `ε/3` with
    /// `ln 𝔑 = ln(cover_size)`. Reported, not enforced.
    pub m_uc: u64,
    pub ell_inf: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub p: Power,
    pub weights: Vec<f64>,
    pub stump_index: usize,
}

/// Per-group loss sums for every stump of `cover`, in cover order, computed
/// with one sorted sweep per feature.
fn stump_losses(data: &GroupedDataset, cover: &StumpCover, kind: LossKind) -> Vec<Vec<f64>> {
    let g = data.n_groups();
    let n = data.len();
    // cost of predicting −1 and +1 on each row
    let neg: Vec<f64> = (0..n)
        .map(|i| loss_value(kind, data.label(i), -1.0))
        .collect();
    let pos: Vec<f64> = (0..n)
        .map(|i| loss_value(kind, data.label(i), 1.0))
        .collect();
    let mut out = Vec::with_capacity(cover.len());
    let mut start = 0;
    while start < cover.len() {
        let j = cover.stumps[start].feature;
        let end = start
            + cover.stumps[start..]
                .iter()
                .take_while(|s| s.feature == j)
                .count();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| data.row(a)[j].total_cmp(&data.row(b)[j]));
        // sums over rows at or below / above the current threshold
        let mut below_neg = vec![0.0; g];
        let mut below_pos = vec![0.0; g];
        let mut above_neg = vec![0.0; g];
        let mut above_pos = vec![0.0; g];
        for i in 0..n {
            let k = data.group_ids()[i];
            above_neg[k] += neg[i];
            above_pos[k] += pos[i];
        }
        let mut next = 0;
        for s in &cover.stumps[start..end] {
            while next < n && data.row(order[next])[j] <= s.threshold {
                let i = order[next];
                let k = data.group_ids()[i];
                above_neg[k] -= neg[i];
                above_pos[k] -= pos[i];
                below_neg[k] += neg[i];
                below_pos[k] += pos[i];
                next += 1;
            }
            let sums = (0..g)
                .map(|k| {
                    if s.direction > 0 {
                        below_neg[k] + above_pos[k]
                    } else {
                        below_pos[k] + above_neg[k]
                    }
                })
                .collect();
            out.push(sums);
        }
        start = end;
    }
    out
}

/// Exhaustive empirical malfare minimization over the stump cover of the
/// concatenated sample. Ties go to the earliest stump in cover order.
pub fn train_cover(data: &GroupedDataset, config: &CoverConfig) -> Result<(Stump, CoverReport)> {
    if !(config.epsilon > 0.0 && config.epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {}",
            config.epsilon
        )));
    }
    if config.p < Power::ONE {
        return Err(Error::InvalidArgument(format!(
            "EMM needs fair malfare p ≥ 1, got {}",
            config.p
        )));
    }
    let g = data.n_groups();
    if config.weights.len() != g {
        return Err(Error::InvalidArgument(format!(
            "{} weights for {g} groups",
            config.weights.len()
        )));
    }
    let weights = SentimentProfile::new(vec![0.0; g], config.weights.clone())?
        .weights()
        .to_vec();
    let sizes: Vec<usize> = data.members().iter().map(Vec::len).collect();
    if let Some(k) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::Dataset(format!(
            "group {:?} has no rows",
            data.group_names()[k]
        )));
    }
    let bias = if config.bias_weighting {
        Some(data.bias_weights()?)
    } else {
        None
    };

    let gamma = config.epsilon / (3.0 * (g as f64).sqrt());
    let cover = enumerate_stump_cover(data, gamma)?;
    let sums = stump_losses(data, &cover, config.kind);

    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    for (idx, s) in sums.into_iter().enumerate() {
        let risks: Vec<f64> = s
            .iter()
            .zip(&sizes)
            .enumerate()
            .map(|(k, (total, &n))| {
                let r = total / n as f64;
                bias.as_ref().map_or(r, |b| r * b[k])
            })
            .collect();
        let value = power_mean_slices(&risks, &weights, config.p);
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, idx, risks));
        }
    }
    let (objective, stump_index, group_risks) = best.expect("cover is nonempty");

    let ell_inf = loss_value(config.kind, 1.0, -1.0);
    let ln_cover = (cover.len() as f64).ln();
    let m_uc = uc_sample_complexity(ell_inf, g, config.delta, config.epsilon / 3.0, |_| ln_cover)?;
    let report = CoverReport {
        objective,
        group_risks,
        gamma,
        cover_size: cover.len(),
        union_cover_size: union_cover_size(data)?,
        m_uc,
        ell_inf,
        epsilon: config.epsilon,
        delta: config.delta,
        p: config.p,
        weights,
        stump_index,
    };
    Ok((cover.stumps[stump_index], report))
}
