//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the library's optimized paths: risks are summed row by
//! row, and the grid oracle evaluates power means straight from the
//! definition.

#![allow(dead_code)]

use malfare::aggregator::{power_mean, SentimentProfile};
use malfare::dataset::GroupedDataset;
use malfare::emm::Stump;
use malfare::losses::{loss_value, LossKind};
use malfare::Power;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `M_p` straight from the definition, for positive finite `p` or `+∞`.
pub fn naive_malfare(risks: &[f64], weights: &[f64], p: Power) -> f64 {
    match p {
        Power::PosInf => risks.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Power::Finite(q) if q > 0.0 => {
            let s: f64 = risks.iter().zip(weights).map(|(r, w)| w * r.powf(q)).sum();
            s.powf(1.0 / q)
        }
        other => panic!("naive_malfare only handles p > 0, got {other}"),
    }
}

/// Per-group mean loss of an arbitrary scorer, summed in row order.
pub fn risks_of<F: Fn(&[f64]) -> f64>(data: &GroupedDataset, kind: LossKind, score: F) -> Vec<f64> {
    let g = data.n_groups();
    let mut sums = vec![0.0; g];
    let mut counts = vec![0usize; g];
    for i in 0..data.len() {
        let k = data.group_ids()[i];
        sums[k] += loss_value(kind, data.label(i), score(data.row(i)));
        counts[k] += 1;
    }
    sums.iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect()
}

pub fn linear_risks(data: &GroupedDataset, kind: LossKind, theta: &[f64]) -> Vec<f64> {
    risks_of(data, kind, |x| {
        x.iter().zip(theta).map(|(a, b)| a * b).sum()
    })
}

/// Smallest malfare over a square grid of pitch `pitch` clipped to the
/// radius-`lambda` disc. Two features only.
pub fn grid_oracle_min(
    data: &GroupedDataset,
    kind: LossKind,
    p: Power,
    weights: &[f64],
    lambda: f64,
    pitch: f64,
) -> (f64, [f64; 2]) {
    assert_eq!(data.n_features(), 2);
    let steps = (lambda / pitch).floor() as i64;
    let axis: Vec<f64> = (-steps..=steps).map(|i| i as f64 * pitch).collect();
    axis.par_iter()
        .map(|&a| {
            let mut best = (f64::INFINITY, [a, 0.0]);
            for &b in &axis {
                if a * a + b * b > lambda * lambda {
                    continue;
                }
                let v = naive_malfare(&linear_risks(data, kind, &[a, b]), weights, p);
                if v < best.0 {
                    best = (v, [a, b]);
                }
            }
            best
        })
        .reduce(
            || (f64::INFINITY, [0.0, 0.0]),
            |x, y| if y.0 < x.0 { y } else { x },
        )
}

/// Every stump over the concatenated sample in feature, threshold,
/// direction order, with thresholds at one point below the minimum, the
/// midpoints, and one point above the maximum.
pub fn all_stumps(data: &GroupedDataset) -> Vec<Stump> {
    let mut out = Vec::new();
    for j in 0..data.n_features() {
        let mut v: Vec<f64> = data.rows().map(|r| r[j]).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        let mut t = vec![v[0] - 1.0 - v[0].abs()];
        if v.len() > 1 {
            for w in v.windows(2) {
                t.push(w[0] + (w[1] - w[0]) / 2.0);
            }
            t.push(v[v.len() - 1] + 1.0 + v[v.len() - 1].abs());
        }
        for threshold in t {
            for direction in [1i8, -1] {
                out.push(Stump {
                    feature: j,
                    threshold,
                    direction,
                });
            }
        }
    }
    out
}

/// Exhaustive stump EMM: (objective, index of the first minimizer, risks).
/// Risks are counted independently; aggregation goes through the library's
/// `power_mean` so objectives are comparable bit for bit.
pub fn brute_force_stumps(
    data: &GroupedDataset,
    kind: LossKind,
    p: Power,
    weights: &[f64],
) -> (f64, usize, Vec<f64>) {
    let mut best = (f64::INFINITY, usize::MAX, Vec::new());
    for (idx, s) in all_stumps(data).iter().enumerate() {
        let r = risks_of(data, kind, |x| s.predict(x));
        let v = power_mean(
            &SentimentProfile::new(r.clone(), weights.to_vec()).unwrap(),
            p,
        );
        if v < best.0 {
            best = (v, idx, r);
        }
    }
    best
}

/// Random grouped dataset with `g` groups, `per_group` rows each and `d`
/// features. When `discrete` is set, features take few distinct values.
pub fn random_dataset(
    seed: u64,
    g: usize,
    per_group: usize,
    d: usize,
    discrete: bool,
) -> GroupedDataset {
    let mut r = rng(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut groups = Vec::new();
    for k in 0..g {
        let shift: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
        for j in 0..per_group {
            let x: Vec<f64> = (0..d)
                .map(|t| {
                    let v = shift[t] + r.random_range(-1.5..1.5);
                    if discrete {
                        (v * 2.0).round() / 2.0
                    } else {
                        v
                    }
                })
                .collect();
            // keep both labels present in every group
            let y = if j < 2 {
                if j == 0 {
                    1.0
                } else {
                    -1.0
                }
            } else if x[0] + 0.3 * r.random_range(-1.0..1.0) > shift[0] {
                1.0
            } else {
                -1.0
            };
            rows.push(x);
            labels.push(y);
            groups.push(k);
        }
    }
    GroupedDataset::new(
        rows,
        labels,
        groups,
        (0..d).map(|j| format!("x{j}")).collect(),
        (0..g).map(|k| format!("g{k}")).collect(),
    )
    .unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn l2(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}
