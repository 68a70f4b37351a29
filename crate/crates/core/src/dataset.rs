//! Group-structured binary classification data.
//!
//! Rows carry a real feature vector, a `±1` label and a group id. Each group
//! has a population weight `wᵢ` (default: empirical frequency over the full
//! dataset) and a class bias `bᵢ`, the fraction of its rows labelled `+1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::aggregator::normalize_weights;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

#[derive(Clone, Debug, PartialEq)]
pub struct GroupedDataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<f64>,
    group_ids: Vec<usize>,
    group_weights: Vec<f64>,
    class_bias: Vec<f64>,
    feature_names: Vec<String>,
    group_names: Vec<String>,
    members: Vec<Vec<usize>>,
}

impl GroupedDataset {
    /// Builds a dataset from rows. Group weights default to the empirical
    /// group frequencies; every group in `0..group_names.len()` must be
    /// nonempty.
    pub fn new(
        rows: Vec<Vec<f64>>,
        labels: Vec<f64>,
        group_ids: Vec<usize>,
        feature_names: Vec<String>,
        group_names: Vec<String>,
    ) -> Result<GroupedDataset> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Dataset("dataset has no rows".into()));
        }
        if labels.len() != n || group_ids.len() != n {
            return Err(Error::Dataset(format!(
                "{n} rows but {} labels and {} group ids",
                labels.len(),
                group_ids.len()
            )));
        }
        let d = feature_names.len();
        let mut features = Vec::with_capacity(n * d);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != d {
                return Err(Error::Dataset(format!(
                    "row {i} has {} features, expected {d}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::Dataset(format!(
                    "row {i} has a non-finite feature {v}"
                )));
            }
            features.extend(row);
        }
        if let Some(y) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(Error::Dataset(format!("labels must be ±1, got {y}")));
        }
        let g = group_names.len();
        if let Some(&k) = group_ids.iter().find(|&&k| k >= g) {
            return Err(Error::Dataset(format!(
                "group id {k} out of range for {g} groups"
            )));
        }

        let mut ds = GroupedDataset {
            features,
            n_features: d,
            labels,
            group_ids,
            group_weights: vec![0.0; g],
            class_bias: vec![0.0; g],
            feature_names,
            group_names,
            members: Vec::new(),
        };
        ds.index_members();
        if let Some(i) = ds.members.iter().position(Vec::is_empty) {
            return Err(Error::Dataset(format!(
                "group {:?} is empty",
                ds.group_names[i]
            )));
        }
        ds.group_weights = ds.group_frequencies();
        ds.class_bias = ds.compute_class_bias();
        Ok(ds)
    }

    fn index_members(&mut self) {
        let mut members = vec![Vec::new(); self.group_names.len()];
        for (i, &k) in self.group_ids.iter().enumerate() {
            members[k].push(i);
        }
        self.members = members;
    }

    pub fn group_frequencies(&self) -> Vec<f64> {
        let n = self.len() as f64;
        self.members.iter().map(|m| m.len() as f64 / n).collect()
    }

    pub fn compute_class_bias(&self) -> Vec<f64> {
        self.members
            .iter()
            .map(|rows| {
                if rows.is_empty() {
                    return 0.0;
                }
                let pos = rows.iter().filter(|&&i| self.labels[i] > 0.0).count();
                pos as f64 / rows.len() as f64
            })
            .collect()
    }

    /// Replaces the population weights `w`.
    pub fn with_group_weights(mut self, weights: Vec<f64>) -> Result<GroupedDataset> {
        if weights.len() != self.n_groups() {
            return Err(Error::Dataset(format!(
                "expected {} group weights, got {}",
                self.n_groups(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Dataset("group weights must be positive".into()));
        }
        self.group_weights = normalize_weights(weights)?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_groups(&self) -> usize {
        self.group_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features
            .chunks(self.n_features.max(1))
            .take(self.len())
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn group_ids(&self) -> &[usize] {
        &self.group_ids
    }

    /// Row indices of each group, in row order.
    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn group_weights(&self) -> &[f64] {
        &self.group_weights
    }

    pub fn class_bias(&self) -> &[f64] {
        &self.class_bias
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn group_names(&self) -> &[String] {
        &self.group_names
    }

    /// Per-group risk multipliers `1/bᵢ`.
    pub fn bias_weights(&self) -> Result<Vec<f64>> {
        self.class_bias
            .iter()
            .zip(&self.group_names)
            .map(|(&b, name)| {
                if b > 0.0 && b <= 1.0 {
                    Ok(1.0 / b)
                } else {
                    Err(Error::Dataset(format!(
                        "group {name:?} has no positive labels, so 1/b is undefined"
                    )))
                }
            })
            .collect()
    }

    /// Largest Euclidean row norm.
    pub fn max_feature_norm(&self) -> f64 {
        self.rows()
            .map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Rows at `indices`, keeping this dataset's group weights and class
    /// bias. Groups may end up empty.
    pub fn subset(&self, indices: &[usize]) -> GroupedDataset {
        let d = self.n_features;
        let mut features = Vec::with_capacity(indices.len() * d);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        let mut ds = GroupedDataset {
            features,
            n_features: d,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            group_ids: indices.iter().map(|&i| self.group_ids[i]).collect(),
            group_weights: self.group_weights.clone(),
            class_bias: self.class_bias.clone(),
            feature_names: self.feature_names.clone(),
            group_names: self.group_names.clone(),
            members: Vec::new(),
        };
        ds.index_members();
        ds
    }

    /// Single-group dataset holding the rows listed in `indices` (repeats
    /// allowed).
    pub fn pooled(&self, indices: &[usize], name: &str) -> Result<GroupedDataset> {
        GroupedDataset::new(
            indices.iter().map(|&i| self.row(i).to_vec()).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
            vec![0; indices.len()],
            self.feature_names.clone(),
            vec![name.to_string()],
        )
    }

    pub fn map_features<F: FnMut(usize, f64) -> f64>(&mut self, mut f: F) {
        let d = self.n_features;
        for (k, x) in self.features.iter_mut().enumerate() {
            *x = f(k % d, *x);
        }
    }

    /// Writes features, then `group` and `label` columns.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        header.push("group");
        header.push("label");
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut record: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            record.push(self.group_names[self.group_ids[i]].clone());
            record.push(if self.labels[i] > 0.0 {
                "1".into()
            } else {
                "-1".into()
            });
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadOptions {
    pub target: String,
    pub group: String,
    /// Target cell value mapped to label `+1`; every other value is `−1`.
    pub positive: String,
    pub delimiter: u8,
    /// One-hot encode non-numeric columns. When false they are an error.
    pub one_hot: bool,
}

impl LoadOptions {
    pub fn new(target: &str, group: &str, positive: &str) -> LoadOptions {
        LoadOptions {
            target: target.into(),
            group: group.into(),
            positive: positive.into(),
            delimiter: b',',
            one_hot: true,
        }
    }
}

pub fn load_csv<P: AsRef<Path>>(path: P, options: &LoadOptions) -> Result<GroupedDataset> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Dataset(format!("cannot open {}: {e}", path.as_ref().display())))?;
    read_csv(file, options)
}

/// Reads a headered CSV. Columns whose every cell parses as a number are
/// numeric; the rest are categorical and one-hot encoded with categories in
/// sorted order.
pub fn read_csv<R: Read>(reader: R, options: &LoadOptions) -> Result<GroupedDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Dataset(format!("missing column {name:?}")))
    };
    let target_col = find(&options.target)?;
    let group_col = find(&options.group)?;

    let mut cells: Vec<Vec<String>> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        cells.push(record.iter().map(|c| c.trim().to_string()).collect());
    }
    if cells.is_empty() {
        return Err(Error::Dataset("CSV has no data rows".into()));
    }

    let feature_cols: Vec<usize> = (0..header.len())
        .filter(|&c| c != target_col && c != group_col)
        .collect();
    enum Column {
        Numeric(Vec<f64>),
        Categorical(Vec<String>),
    }
    let mut columns = Vec::with_capacity(feature_cols.len());
    let mut feature_names = Vec::new();
    for &c in &feature_cols {
        let parsed: Option<Vec<f64>> = cells
            .iter()
            .map(|row| row[c].parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect();
        match parsed {
            Some(values) => {
                feature_names.push(header[c].clone());
                columns.push(Column::Numeric(values));
            }
            None if options.one_hot => {
                let categories: Vec<String> = cells
                    .iter()
                    .map(|row| row[c].clone())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                feature_names.extend(categories.iter().map(|v| format!("{}={}", header[c], v)));
                columns.push(Column::Categorical(categories));
            }
            None => {
                return Err(Error::Dataset(format!(
                    "column {:?} is not numeric and one-hot encoding is disabled",
                    header[c]
                )))
            }
        }
    }

    let group_names: Vec<String> = cells
        .iter()
        .map(|row| row[group_col].clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let group_lookup: BTreeMap<&str, usize> = group_names
        .iter()
        .enumerate()
        .map(|(i, g)| (g.as_str(), i))
        .collect();

    let mut rows = Vec::with_capacity(cells.len());
    let mut labels = Vec::with_capacity(cells.len());
    let mut group_ids = Vec::with_capacity(cells.len());
    for (r, row) in cells.iter().enumerate() {
        let mut features = Vec::with_capacity(feature_names.len());
        for (&c, column) in feature_cols.iter().zip(&columns) {
            match column {
                Column::Numeric(values) => features.push(values[r]),
                Column::Categorical(categories) => {
                    features.extend(
                        categories
                            .iter()
                            .map(|v| if *v == row[c] { 1.0 } else { 0.0 }),
                    )
                }
            }
        }
        rows.push(features);
        labels.push(if row[target_col] == options.positive {
            1.0
        } else {
            -1.0
        });
        group_ids.push(group_lookup[row[group_col].as_str()]);
    }
    GroupedDataset::new(rows, labels, group_ids, feature_names, group_names)
}

/// Per-column z-score statistics (population standard deviation).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZScore {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    /// Columns with zero variance; they standardize to all zeros.
    pub constant_columns: Vec<usize>,
}

impl ZScore {
    pub fn fit(data: &GroupedDataset) -> Result<ZScore> {
        let n = data.len();
        if n == 0 {
            return Err(Error::Dataset(
                "cannot fit z-scores on an empty dataset".into(),
            ));
        }
        let d = data.n_features();
        let mut means = vec![0.0; d];
        for row in data.rows() {
            for (m, x) in means.iter_mut().zip(row) {
                *m += x;
            }
        }
        means.iter_mut().for_each(|m| *m /= n as f64);
        let mut sds = vec![0.0; d];
        for row in data.rows() {
            for ((s, x), m) in sds.iter_mut().zip(row).zip(&means) {
                *s += (x - m) * (x - m);
            }
        }
        sds.iter_mut().for_each(|s| *s = (*s / n as f64).sqrt());
        let constant_columns = sds
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == 0.0)
            .map(|(i, _)| i)
            .collect();
        Ok(ZScore {
            means,
            sds,
            constant_columns,
        })
    }

    pub fn apply(&self, data: &mut GroupedDataset) {
        data.map_features(|j, x| {
            if self.sds[j] == 0.0 {
                0.0
            } else {
                (x - self.means[j]) / self.sds[j]
            }
        });
    }

    pub fn warnings(&self, names: &[String]) -> Vec<String> {
        self.constant_columns
            .iter()
            .map(|&j| {
                format!(
                    "column {:?} has zero variance and was standardized to zeros",
                    names[j]
                )
            })
            .collect()
    }
}

/// Stratified train/test split. Each group contributes
/// `round(nᵢ · test_fraction)` rows to the test set, always leaving at least
/// one training row. Both halves keep the full-data group weights.
pub fn split(
    data: &GroupedDataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(GroupedDataset, GroupedDataset)> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::InvalidArgument(format!(
            "test fraction must lie in [0, 1), got {test_fraction}"
        )));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (k, rows) in data.members().iter().enumerate() {
        let mut rows = rows.clone();
        let mut rng = stream_rng(seed, k as u64);
        rows.shuffle(&mut rng);
        let n_test = ((rows.len() as f64 * test_fraction).round() as usize)
            .min(rows.len().saturating_sub(1));
        test.extend_from_slice(&rows[..n_test]);
        train.extend_from_slice(&rows[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((data.subset(&train), data.subset(&test)))
}

/// Bundled synthetic tasks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Synthetic {
    /// Two groups in 2-D, each linearly separable through the origin on its
    /// own but not jointly.
    TwoGaussians2group { per_group: usize },
    /// Two groups sharing one separator with margin.
    JointlySeparable { per_group: usize },
    /// Two groups on identical 1-D points: group `a` labels everything `+1`,
    /// group `b` everything `−1`.
    Conflict1d { per_group: usize, weight_a: f64 },
    /// `groups` groups of decreasing size and increasing label noise, with
    /// rotated separators.
    Heterogeneous { groups: usize, per_group: usize },
}

impl Synthetic {
    pub fn name(&self) -> &'static str {
        match self {
            Synthetic::TwoGaussians2group { .. } => "two-gaussians-2group",
            Synthetic::JointlySeparable { .. } => "jointly-separable",
            Synthetic::Conflict1d { .. } => "conflict-1d",
            Synthetic::Heterogeneous { .. } => "heterogeneous",
        }
    }
}

impl fmt::Display for Synthetic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Synthetic {
    type Err = Error;

    /// Parses a generator name with default sizes.
    fn from_str(s: &str) -> Result<Synthetic> {
        match s {
            "two-gaussians-2group" => Ok(Synthetic::TwoGaussians2group { per_group: 200 }),
            "jointly-separable" => Ok(Synthetic::JointlySeparable { per_group: 100 }),
            "conflict-1d" => Ok(Synthetic::Conflict1d {
                per_group: 20,
                weight_a: 0.6,
            }),
            "heterogeneous" => Ok(Synthetic::Heterogeneous {
                groups: 5,
                per_group: 200,
            }),
            other => Err(Error::InvalidArgument(format!(
                "unknown synthetic generator {other:?}"
            ))),
        }
    }
}

fn normal2<R: Rng>(rng: &mut R, sigma: f64) -> [f64; 2] {
    let a: f64 = StandardNormal.sample(rng);
    let b: f64 = StandardNormal.sample(rng);
    [sigma * a, sigma * b]
}

fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn xy_names() -> Vec<String> {
    vec!["x1".into(), "x2".into()]
}

pub fn make_synthetic(spec: &Synthetic, seed: u64) -> Result<GroupedDataset> {
    let mut rng = stream_rng(seed, 0);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut groups = Vec::new();
    match *spec {
        Synthetic::TwoGaussians2group { per_group } => {
            if per_group < 2 {
                return Err(Error::InvalidArgument(
                    "per_group must be at least 2".into(),
                ));
            }
            // class means (+1 at `mean`, −1 at `−mean`) and each group's own separator
            let setups = [([2.0, -1.0], [2.0, -1.0]), ([-1.0, 2.0], [-1.0, 2.0])];
            for (k, (mean, normal)) in setups.into_iter().enumerate() {
                let norm = dot2(normal, normal).sqrt();
                for j in 0..per_group {
                    let y = if j % 2 == 0 { 1.0 } else { -1.0 };
                    let x = loop {
                        let e = normal2(&mut rng, 0.6);
                        let x = [y * mean[0] + e[0], y * mean[1] + e[1]];
                        if y * dot2(x, normal) / norm >= 0.3 {
                            break x;
                        }
                    };
                    rows.push(x.to_vec());
                    labels.push(y);
                    groups.push(k);
                }
            }
            GroupedDataset::new(
                rows,
                labels,
                groups,
                xy_names(),
                vec!["a".into(), "b".into()],
            )
        }
        Synthetic::JointlySeparable { per_group } => {
            let theta = [0.8, 0.6];
            let centers = [[1.0, 1.0], [-1.0, 0.5]];
            for (k, c) in centers.into_iter().enumerate() {
                for _ in 0..per_group {
                    let x = loop {
                        let e = normal2(&mut rng, 1.0);
                        let x = [c[0] + e[0], c[1] + e[1]];
                        if dot2(x, theta).abs() >= 0.75 {
                            break x;
                        }
                    };
                    labels.push(dot2(x, theta).signum());
                    rows.push(x.to_vec());
                    groups.push(k);
                }
            }
            GroupedDataset::new(
                rows,
                labels,
                groups,
                xy_names(),
                vec!["a".into(), "b".into()],
            )
        }
        Synthetic::Conflict1d {
            per_group,
            weight_a,
        } => {
            if per_group == 0 {
                return Err(Error::InvalidArgument("per_group must be positive".into()));
            }
            let xs: Vec<f64> = (0..per_group)
                .map(|j| (j as f64 + 0.5) / per_group as f64)
                .collect();
            for (k, y) in [(0, 1.0), (1, -1.0)] {
                for &x in &xs {
                    rows.push(vec![x]);
                    labels.push(y);
                    groups.push(k);
                }
            }
            GroupedDataset::new(
                rows,
                labels,
                groups,
                vec!["x".into()],
                vec!["a".into(), "b".into()],
            )?
            .with_group_weights(vec![weight_a, 1.0 - weight_a])
        }
        Synthetic::Heterogeneous {
            groups: g,
            per_group,
        } => {
            if g == 0 || per_group < 2 {
                return Err(Error::InvalidArgument(
                    "need at least one group of two rows".into(),
                ));
            }
            let mut names = Vec::with_capacity(g);
            for k in 0..g {
                let frac = if g == 1 {
                    0.0
                } else {
                    k as f64 / (g - 1) as f64
                };
                let angle = frac * std::f64::consts::FRAC_PI_2;
                let normal = [angle.cos(), angle.sin()];
                let noise = 0.05 + 0.2 * frac;
                let size = ((per_group as f64) * (1.0 - 0.6 * frac)).round().max(2.0) as usize;
                for _ in 0..size {
                    let x = normal2(&mut rng, 1.0);
                    let mut y = if dot2(x, normal) >= 0.0 { 1.0 } else { -1.0 };
                    if rng.random::<f64>() < noise {
                        y = -y;
                    }
                    rows.push(x.to_vec());
                    labels.push(y);
                    groups.push(k);
                }
                names.push(format!("g{k}"));
            }
            GroupedDataset::new(rows, labels, groups, xy_names(), names)
        }
    }
}
