//! Scalar losses, `ℓ2`-ball constrained linear models and per-group risks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::GroupedDataset;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Hinge,
    #[serde(rename = "logistic")]
    LogisticCE,
    ZeroOne,
    Square,
}

impl LossKind {
    pub fn is_convex(self) -> bool {
        !matches!(self, LossKind::ZeroOne)
    }

    /// Lipschitz constant of `ŷ ↦ ℓ(y, ŷ)` over `|ŷ| ≤ max_prediction`.
    pub fn lipschitz(self, max_prediction: f64) -> f64 {
        match self {
            LossKind::Hinge | LossKind::LogisticCE => 1.0,
            LossKind::Square => 2.0 * (max_prediction + 1.0),
            LossKind::ZeroOne => f64::INFINITY,
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::Hinge => "hinge",
            LossKind::LogisticCE => "logistic",
            LossKind::ZeroOne => "zero_one",
            LossKind::Square => "square",
        })
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<LossKind> {
        match s.to_ascii_lowercase().as_str() {
            "hinge" => Ok(LossKind::Hinge),
            "logistic" | "logistic_ce" | "log" => Ok(LossKind::LogisticCE),
            "zero_one" | "zero-one" | "01" | "0-1" => Ok(LossKind::ZeroOne),
            "square" | "squared" => Ok(LossKind::Square),
            other => Err(Error::InvalidArgument(format!("unknown loss {other:?}"))),
        }
    }
}

/// `ℓ(y, ŷ)` for a label `y ∈ {−1, +1}`.
///
/// The 0-1 loss is the misclassification indicator, with `ŷ = 0` counted as
/// an error for both labels.
pub fn loss_value(kind: LossKind, y: f64, yhat: f64) -> f64 {
    let margin = y * yhat;
    match kind {
        LossKind::Hinge => (1.0 - margin).max(0.0),
        LossKind::LogisticCE => (-margin.abs()).exp().ln_1p() + (-margin).max(0.0),
        LossKind::ZeroOne => {
            if margin > 0.0 {
                0.0
            } else {
                1.0
            }
        }
        LossKind::Square => (y - yhat) * (y - yhat),
    }
}

/// `dℓ/dŷ` (a subgradient at kinks). The hinge kink `yŷ = 1` takes 0.
fn loss_slope(kind: LossKind, y: f64, yhat: f64) -> Result<f64> {
    let margin = y * yhat;
    match kind {
        LossKind::Hinge => Ok(if margin < 1.0 { -y } else { 0.0 }),
        LossKind::LogisticCE => Ok(-y * sigmoid(-margin)),
        LossKind::Square => Ok(2.0 * (yhat - y)),
        LossKind::ZeroOne => Err(Error::NonConvexLoss(kind)),
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Subgradient of `θ ↦ ℓ(y, x·θ)`.
pub fn loss_subgradient(kind: LossKind, y: f64, x: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
    let slope = loss_slope(kind, y, dot(x, theta))?;
    Ok(x.iter().map(|xi| slope * xi).collect())
}

/// Euclidean projection onto `{θ : ‖θ‖₂ ≤ λ}`.
pub fn project_l2_ball(theta: &[f64], lambda: f64) -> Vec<f64> {
    let n = norm(theta);
    if n <= lambda {
        theta.to_vec()
    } else {
        theta.iter().map(|t| t * lambda / n).collect()
    }
}

pub(crate) fn project_in_place(theta: &mut [f64], lambda: f64) {
    let n = norm(theta);
    if n > lambda {
        let s = lambda / n;
        theta.iter_mut().for_each(|t| *t *= s);
    }
}

/// Linear scorer `x ↦ x·θ` with `‖θ‖₂ ≤ λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub theta: Vec<f64>,
    pub lambda: f64,
    pub loss: LossKind,
}

impl LinearModel {
    pub fn new(theta: Vec<f64>, lambda: f64, loss: LossKind) -> Result<LinearModel> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        let n = norm(&theta);
        if n > lambda * (1.0 + 1e-9) {
            return Err(Error::InvalidArgument(format!(
                "‖θ‖ = {n} exceeds λ = {lambda}"
            )));
        }
        Ok(LinearModel {
            theta,
            lambda,
            loss,
        })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        dot(x, &self.theta)
    }

    pub fn group_risks(
        &self,
        data: &GroupedDataset,
        kind: LossKind,
        bias_weighting: bool,
    ) -> Result<RiskVector> {
        group_risks(&self.theta, data, kind, bias_weighting)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskVector {
    /// Per-group mean loss, already multiplied by `bias_weights` when present.
    pub per_group: Vec<f64>,
    pub bias_weights: Option<Vec<f64>>,
}

impl RiskVector {
    pub fn max(&self) -> f64 {
        self.per_group
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Mean loss of `x ↦ x·θ` within each group, optionally scaled by `1/bᵢ`.
pub fn group_risks(
    theta: &[f64],
    data: &GroupedDataset,
    kind: LossKind,
    bias_weighting: bool,
) -> Result<RiskVector> {
    check_dims(theta, data)?;
    let bias = if bias_weighting {
        Some(data.bias_weights()?)
    } else {
        None
    };
    let mut per_group = Vec::with_capacity(data.n_groups());
    for (k, rows) in data.members().iter().enumerate() {
        if rows.is_empty() {
            return Err(Error::Dataset(format!(
                "group {:?} has no rows",
                data.group_names()[k]
            )));
        }
        let total: f64 = rows
            .iter()
            .map(|&i| loss_value(kind, data.label(i), dot(data.row(i), theta)))
            .sum();
        let mut risk = total / rows.len() as f64;
        if let Some(b) = &bias {
            risk *= b[k];
        }
        per_group.push(risk);
    }
    Ok(RiskVector {
        per_group,
        bias_weights: bias,
    })
}

/// Per-group risks together with a subgradient of each group's risk.
pub(crate) fn group_risks_and_subgradients(
    theta: &[f64],
    data: &GroupedDataset,
    kind: LossKind,
    bias: Option<&[f64]>,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let d = theta.len();
    let mut risks = Vec::with_capacity(data.n_groups());
    let mut grads = Vec::with_capacity(data.n_groups());
    for (k, rows) in data.members().iter().enumerate() {
        if rows.is_empty() {
            return Err(Error::Dataset(format!(
                "group {:?} has no rows",
                data.group_names()[k]
            )));
        }
        let mut total = 0.0;
        let mut grad = vec![0.0; d];
        for &i in rows {
            let x = data.row(i);
            let y = data.label(i);
            let yhat = dot(x, theta);
            total += loss_value(kind, y, yhat);
            let slope = loss_slope(kind, y, yhat)?;
            if slope != 0.0 {
                grad.iter_mut().zip(x).for_each(|(g, xi)| *g += slope * xi);
            }
        }
        let scale = bias.map_or(1.0, |b| b[k]) / rows.len() as f64;
        risks.push(total * scale);
        grad.iter_mut().for_each(|g| *g *= scale);
        grads.push(grad);
    }
    Ok((risks, grads))
}

pub(crate) fn check_dims(theta: &[f64], data: &GroupedDataset) -> Result<()> {
    if theta.len() != data.n_features() {
        return Err(Error::InvalidArgument(format!(
            "θ has {} entries but the data has {} features",
            theta.len(),
            data.n_features()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loss_examples() {
        assert_eq!(loss_value(LossKind::Hinge, 1.0, 0.5), 0.5);
        assert!(
            (loss_value(LossKind::LogisticCE, 1.0, 0.0) - std::f64::consts::LN_2).abs() < 1e-15
        );
        assert_eq!(loss_value(LossKind::ZeroOne, 1.0, -2.0), 1.0);
        assert_eq!(loss_value(LossKind::Hinge, 1.0, 2.0), 0.0);
        assert_eq!(loss_value(LossKind::ZeroOne, 1.0, 0.0), 1.0);
        assert_eq!(loss_value(LossKind::ZeroOne, -1.0, 0.0), 1.0);
        assert_eq!(loss_value(LossKind::Square, 1.0, -1.0), 4.0);
    }

    #[test]
    fn logistic_is_stable_at_extremes() {
        assert!((loss_value(LossKind::LogisticCE, 1.0, -800.0) - 800.0).abs() < 1e-9);
        assert_eq!(loss_value(LossKind::LogisticCE, 1.0, 800.0), 0.0);
    }

    #[test]
    fn subgradient_examples() {
        let g = loss_subgradient(LossKind::Hinge, 1.0, &[1.0, 2.0], &[2.0, 0.0]).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
        let g = loss_subgradient(LossKind::LogisticCE, 1.0, &[2.0, -4.0], &[0.0, 0.0]).unwrap();
        assert_eq!(g, vec![-1.0, 2.0]);
        // kink at margin exactly 1 takes the zero subgradient
        let g = loss_subgradient(LossKind::Hinge, 1.0, &[1.0], &[1.0]).unwrap();
        assert_eq!(g, vec![0.0]);
        assert!(matches!(
            loss_subgradient(LossKind::ZeroOne, 1.0, &[1.0], &[1.0]),
            Err(Error::NonConvexLoss(LossKind::ZeroOne))
        ));
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_l2_ball(&[0.3, 0.4], 1.0), vec![0.3, 0.4]);
        let p = project_l2_ball(&[3.0, 4.0], 1.0);
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
        assert_eq!(project_l2_ball(&[0.0, 0.0], 1.0), vec![0.0, 0.0]);
    }

    #[test]
    fn model_norm_invariant() {
        assert!(LinearModel::new(vec![3.0, 4.0], 5.0, LossKind::Hinge).is_ok());
        assert!(LinearModel::new(vec![3.0, 4.0], 4.9, LossKind::Hinge).is_err());
        assert!(LinearModel::new(vec![0.0], 0.0, LossKind::Hinge).is_err());
    }

    fn two_point() -> GroupedDataset {
        GroupedDataset::new(
            vec![vec![1.0], vec![1.0]],
            vec![1.0, -1.0],
            vec![0, 1],
            vec!["x".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap()
    }

    #[test]
    fn group_risk_examples() {
        let ds = two_point();
        let r = group_risks(&[0.0], &ds, LossKind::Hinge, false).unwrap();
        assert_eq!(r.per_group, vec![1.0, 1.0]);
        assert!(r.bias_weights.is_none());
        // single point per group: the loss of that point
        let r = group_risks(&[0.5], &ds, LossKind::Hinge, false).unwrap();
        assert_eq!(r.per_group, vec![0.5, 1.5]);
        assert!(group_risks(&[0.0, 1.0], &ds, LossKind::Hinge, false).is_err());
    }

    #[test]
    fn separated_data_has_zero_hinge_risk() {
        let ds = GroupedDataset::new(
            vec![vec![2.0], vec![-3.0], vec![1.5], vec![-1.0]],
            vec![1.0, -1.0, 1.0, -1.0],
            vec![0, 0, 1, 1],
            vec!["x".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let r = group_risks(&[1.0], &ds, LossKind::Hinge, false).unwrap();
        assert_eq!(r.per_group, vec![0.0, 0.0]);
        let r = group_risks(&[1.0], &ds, LossKind::Hinge, true).unwrap();
        assert_eq!(r.bias_weights, Some(vec![2.0, 2.0]));
    }

    #[test]
    fn loss_names_round_trip() {
        for kind in [
            LossKind::Hinge,
            LossKind::LogisticCE,
            LossKind::ZeroOne,
            LossKind::Square,
        ] {
            assert_eq!(kind.to_string().parse::<LossKind>().unwrap(), kind);
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{kind}\""));
        }
    }
}
