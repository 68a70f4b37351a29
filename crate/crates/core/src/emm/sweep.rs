use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregator::{power_mean_slices, Power};
use crate::dataset::GroupedDataset;
use crate::error::Result;
use crate::losses::{group_risks, LossKind};

use super::psg::{train_psg, TrainConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: Power,
    pub train_risks: Vec<f64>,
    /// Absent without a test set or when some group has no test rows.
    pub test_risks: Option<Vec<f64>>,
    pub train_malfare: f64,
    pub test_malfare: Option<f64>,
    pub eps_opt: f64,
    pub iterations: u64,
    pub theta: Vec<f64>,
}

/// One [`train_psg`] run per grid point, all sharing `base` apart from `p`.
/// Rows come back in grid order.
pub fn sweep_p(
    train: &GroupedDataset,
    test: Option<&GroupedDataset>,
    kind: LossKind,
    p_grid: &[Power],
    base: &TrainConfig,
) -> Result<Vec<SweepRow>> {
    p_grid
        .par_iter()
        .map(|&p| {
            let config = TrainConfig { p, ..base.clone() };
            let out = train_psg(train, kind, &config)?;
            let theta = out.model.theta;
            let train_risks = group_risks(&theta, train, kind, base.bias_weighting)?.per_group;
            let train_malfare = power_mean_slices(&train_risks, &out.weights, p);
            let test_risks = match test {
                Some(t) if t.members().iter().all(|m| !m.is_empty()) => {
                    Some(group_risks(&theta, t, kind, base.bias_weighting)?.per_group)
                }
                _ => None,
            };
            let test_malfare = test_risks
                .as_ref()
                .map(|r| power_mean_slices(r, &out.weights, p));
            Ok(SweepRow {
                p,
                train_risks,
                test_risks,
                train_malfare,
                test_malfare,
                eps_opt: out.plan.eps_opt,
                iterations: out.plan.n,
                theta,
            })
        })
        .collect()
}

/// Writes the sweep as CSV: `p`, one `train_risk:<group>` and
/// `test_risk:<group>` column per group, then both malfare columns. Missing
/// test values are left empty.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], group_names: &[String], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["p".to_string()];
    header.extend(group_names.iter().map(|g| format!("train_risk:{g}")));
    header.extend(group_names.iter().map(|g| format!("test_risk:{g}")));
    header.push("train_malfare".into());
    header.push("test_malfare".into());
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![row.p.to_string()];
        rec.extend(row.train_risks.iter().map(f64::to_string));
        match &row.test_risks {
            Some(r) => rec.extend(r.iter().map(f64::to_string)),
            None => rec.extend(group_names.iter().map(|_| String::new())),
        }
        rec.push(row.train_malfare.to_string());
        rec.push(row.test_malfare.map_or_else(String::new, |v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
