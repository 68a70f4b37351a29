use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::aggregator::Power;
use crate::dataset::GroupedDataset;
use crate::error::{Error, Result};
use crate::losses::{check_dims, project_in_place, LinearModel, LossKind};

use super::objective::Objective;

pub const DEFAULT_MAX_ITERATIONS: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum SubgradientMode {
    Analytic,
    /// Forward differences with step `h`, for cross-checking the analytic
    /// chain rule.
    ForwardDifference {
        h: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub p: Power,
    pub weights: Vec<f64>,
    pub epsilon: f64,
    /// Radius of the `ℓ2` ball the parameters are projected onto.
    pub lambda: f64,
    pub lambda_ell: f64,
    pub lambda_h: f64,
    pub diam: f64,
    /// Starting point; zeros when absent.
    pub theta0: Option<Vec<f64>>,
    pub seed: u64,
    pub max_iterations: u64,
    pub subgradient: SubgradientMode,
    pub bias_weighting: bool,
    /// Keep every `trace_stride`-th trace entry (the final one is always kept).
    pub trace_stride: u64,
}

impl TrainConfig {
    /// Constants for a linear model on `data`: `λ_H` is the largest row norm,
    /// `Diam = 2λ`, and `λ_ℓ` is the loss's Lipschitz constant over
    /// `|ŷ| ≤ λ·λ_H`, scaled by the largest `1/bᵢ` under bias weighting.
    pub fn for_dataset(
        data: &GroupedDataset,
        kind: LossKind,
        p: Power,
        lambda: f64,
        epsilon: f64,
        bias_weighting: bool,
    ) -> Result<TrainConfig> {
        let lambda_h = data.max_feature_norm();
        let mut lambda_ell = kind.lipschitz(lambda * lambda_h);
        if bias_weighting {
            lambda_ell *= data.bias_weights()?.into_iter().fold(0.0, f64::max);
        }
        Ok(TrainConfig {
            p,
            weights: data.group_weights().to_vec(),
            epsilon,
            lambda,
            lambda_ell,
            lambda_h,
            diam: 2.0 * lambda,
            theta0: None,
            seed: 0,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            subgradient: SubgradientMode::Analytic,
            bias_weighting,
            trace_stride: 1,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("epsilon", self.epsilon),
            ("lambda", self.lambda),
            ("lambda_ell", self.lambda_ell),
            ("lambda_h", self.lambda_h),
            ("diam", self.diam),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if let SubgradientMode::ForwardDifference { h } = self.subgradient {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "finite-difference step must be positive, got {h}"
                )));
            }
        }
        Ok(())
    }

    pub fn plan(&self) -> Result<IterationPlan> {
        self.validate()?;
        IterationPlan::new(self.diam, self.lambda_ell, self.lambda_h, self.epsilon)
    }
}

/// Iteration count `n`, step size `α` and the optimization error bound
/// `ε_opt = Diam·λ_ℓ·λ_H/√n ≤ ε/3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationPlan {
    pub n: u64,
    pub alpha: f64,
    pub eps_opt: f64,
}

impl IterationPlan {
    pub fn new(diam: f64, lambda_ell: f64, lambda_h: f64, epsilon: f64) -> Result<IterationPlan> {
        let scale = diam * lambda_ell * lambda_h;
        let x = (3.0 * scale / epsilon).powi(2);
        if !x.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "iteration count overflows for ε = {epsilon}"
            )));
        }
        // (3·2·1·1/0.1)² evaluates to 3600.0000000000005; treat such values as exact
        let r = x.round();
        let n = if (x - r).abs() <= 1e-9 * r.max(1.0) {
            r
        } else {
            x.ceil()
        };
        let n = (n as u64).max(1);
        let root = (n as f64).sqrt();
        Ok(IterationPlan {
            n,
            alpha: diam / (lambda_ell * lambda_h * root),
            eps_opt: scale / root,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iter: u64,
    pub objective: f64,
    pub step_size: f64,
}

/// Serialized form of a trained model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub theta: Vec<f64>,
    pub lambda: f64,
    pub loss: LossKind,
    pub p: Power,
    pub weights: Vec<f64>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutcome {
    pub model: LinearModel,
    pub trace: Vec<TraceEntry>,
    pub plan: IterationPlan,
    pub best_objective: f64,
    pub best_iter: u64,
    pub p: Power,
    /// Normalized group weights used by the objective.
    pub weights: Vec<f64>,
    pub seed: u64,
}

impl TrainOutcome {
    pub fn model_file(&self) -> ModelFile {
        ModelFile {
            theta: self.model.theta.clone(),
            lambda: self.model.lambda,
            loss: self.model.loss,
            p: self.p,
            weights: self.weights.clone(),
            seed: self.seed,
        }
    }

    /// Writes the trace as JSON lines.
    pub fn write_trace<W: Write>(&self, mut out: W) -> Result<()> {
        for entry in &self.trace {
            serde_json::to_writer(&mut out, entry)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Projected subgradient descent on the empirical malfare over the
/// `λ`-ball, with the fixed step and iteration count of [`IterationPlan`].
/// Returns the best iterate seen, including the final one.
pub fn train_psg(
    data: &GroupedDataset,
    kind: LossKind,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    if !kind.is_convex() {
        return Err(Error::NonConvexLoss(kind));
    }
    let plan = config.plan()?;
    if plan.n > config.max_iterations {
        return Err(Error::IterationCap {
            n: plan.n,
            cap: config.max_iterations,
        });
    }
    let objective = Objective::new(kind, config.p, &config.weights, config.bias_weighting)?;
    let mut theta = match &config.theta0 {
        Some(t) => t.clone(),
        None => vec![0.0; data.n_features()],
    };
    check_dims(&theta, data)?;
    project_in_place(&mut theta, config.lambda);

    let stride = config.trace_stride.max(1);
    let mut trace = Vec::with_capacity((plan.n / stride + 2).min(1 << 20) as usize);
    let mut best = (f64::INFINITY, theta.clone(), 0);
    for iter in 0..=plan.n {
        let last = iter == plan.n;
        let (value, grad) = if last {
            (objective.value(&theta, data)?, Vec::new())
        } else {
            match config.subgradient {
                SubgradientMode::Analytic => objective.value_and_subgradient(&theta, data)?,
                SubgradientMode::ForwardDifference { h } => {
                    objective.forward_difference(&theta, data, h)?
                }
            }
        };
        if value < best.0 {
            best = (value, theta.clone(), iter);
        }
        let step_size = if last { 0.0 } else { plan.alpha };
        if last || iter % stride == 0 {
            trace.push(TraceEntry {
                iter,
                objective: value,
                step_size,
            });
        }
        if !last {
            theta
                .iter_mut()
                .zip(&grad)
                .for_each(|(t, g)| *t -= plan.alpha * g);
            project_in_place(&mut theta, config.lambda);
        }
    }

    let (best_objective, theta, best_iter) = best;
    Ok(TrainOutcome {
        model: LinearModel::new(theta, config.lambda, kind)?,
        trace,
        plan,
        best_objective,
        best_iter,
        p: config.p,
        weights: objective.weights().to_vec(),
        seed: config.seed,
    })
}
