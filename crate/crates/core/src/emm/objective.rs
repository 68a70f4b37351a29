use crate::aggregator::{power_mean_slices, Power, SentimentProfile};
use crate::dataset::GroupedDataset;
use crate::error::{Error, Result};
use crate::losses::{check_dims, group_risks, group_risks_and_subgradients, LossKind};

/// Floor applied to zero group risks inside the chain weights for `p > 1`.
pub const ZERO_RISK_FLOOR: f64 = 1e-12;

/// Empirical malfare `θ ↦ W̄_p(i ↦ R̂ᵢ(θ); w)` of a linear model.
#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    kind: LossKind,
    p: Power,
    weights: Vec<f64>,
    bias_weighting: bool,
}

impl Objective {
    /// `p` must be at least 1; `weights` are validated and renormalized like a
    /// [`SentimentProfile`]'s.
    pub fn new(
        kind: LossKind,
        p: Power,
        weights: &[f64],
        bias_weighting: bool,
    ) -> Result<Objective> {
        if p < Power::ONE {
            return Err(Error::InvalidArgument(format!(
                "EMM needs fair malfare p ≥ 1, got {p}"
            )));
        }
        let profile = SentimentProfile::new(vec![0.0; weights.len()], weights.to_vec())?;
        Ok(Objective {
            kind,
            p,
            weights: profile.weights().to_vec(),
            bias_weighting,
        })
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn p(&self) -> Power {
        self.p
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias_weighting(&self) -> bool {
        self.bias_weighting
    }

    fn check(&self, data: &GroupedDataset) -> Result<()> {
        if data.n_groups() != self.weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} groups",
                self.weights.len(),
                data.n_groups()
            )));
        }
        Ok(())
    }

    /// Malfare of an already computed risk vector.
    pub fn aggregate(&self, risks: &[f64]) -> f64 {
        power_mean_slices(risks, &self.weights, self.p)
    }

    pub fn value(&self, theta: &[f64], data: &GroupedDataset) -> Result<f64> {
        self.check(data)?;
        let risks = group_risks(theta, data, self.kind, self.bias_weighting)?;
        Ok(self.aggregate(&risks.per_group))
    }

    pub fn subgradient(&self, theta: &[f64], data: &GroupedDataset) -> Result<Vec<f64>> {
        Ok(self.value_and_subgradient(theta, data)?.1)
    }

    /// Objective value and an analytic subgradient in one pass over the data.
    pub fn value_and_subgradient(
        &self,
        theta: &[f64],
        data: &GroupedDataset,
    ) -> Result<(f64, Vec<f64>)> {
        self.check(data)?;
        check_dims(theta, data)?;
        let bias = if self.bias_weighting {
            Some(data.bias_weights()?)
        } else {
            None
        };
        let (risks, grads) = group_risks_and_subgradients(theta, data, self.kind, bias.as_deref())?;
        let value = self.aggregate(&risks);
        let chain = self.chain_weights(&risks, value);
        let mut out = vec![0.0; theta.len()];
        for (c, grad) in chain.iter().zip(&grads) {
            if *c != 0.0 {
                out.iter_mut().zip(grad).for_each(|(o, g)| *o += c * g);
            }
        }
        Ok((value, out))
    }

    /// `∂W̄/∂R̂ᵢ`: `wᵢ (R̂ᵢ/W̄)^{p−1}` for finite `p`, and the indicator of the
    /// lowest-index maximal group for `p = ∞`.
    pub fn chain_weights(&self, risks: &[f64], value: f64) -> Vec<f64> {
        match self.p {
            Power::PosInf => {
                let mut best = 0;
                for (i, r) in risks.iter().enumerate() {
                    if *r > risks[best] {
                        best = i;
                    }
                }
                let mut c = vec![0.0; risks.len()];
                c[best] = 1.0;
                c
            }
            Power::Finite(p) if p > 1.0 && value > 0.0 => risks
                .iter()
                .zip(&self.weights)
                .map(|(r, w)| w * (r.max(ZERO_RISK_FLOOR) / value).powf(p - 1.0))
                .collect(),
            _ => self.weights.clone(),
        }
    }

    /// Forward-difference estimate `(f(θ + h·eⱼ) − f(θ)) / h`.
    pub fn forward_difference(
        &self,
        theta: &[f64],
        data: &GroupedDataset,
        h: f64,
    ) -> Result<(f64, Vec<f64>)> {
        let base = self.value(theta, data)?;
        let mut probe = theta.to_vec();
        let mut grad = Vec::with_capacity(theta.len());
        for j in 0..theta.len() {
            probe[j] = theta[j] + h;
            grad.push((self.value(&probe, data)? - base) / h);
            probe[j] = theta[j];
        }
        Ok((base, grad))
    }
}

/// Empirical malfare of `θ` under `(p, weights)`, without bias weighting.
pub fn emm_objective(
    theta: &[f64],
    data: &GroupedDataset,
    kind: LossKind,
    p: Power,
    weights: &[f64],
) -> Result<f64> {
    Objective::new(kind, p, weights, false)?.value(theta, data)
}

/// Analytic subgradient of [`emm_objective`]. Convex losses only.
pub fn emm_subgradient(
    theta: &[f64],
    data: &GroupedDataset,
    kind: LossKind,
    p: Power,
    weights: &[f64],
) -> Result<Vec<f64>> {
    if !kind.is_convex() {
        return Err(Error::NonConvexLoss(kind));
    }
    Objective::new(kind, p, weights, false)?.subgradient(theta, data)
}
