//! Labeled, attribute-annotated tabular data.
//!
//! Holds the immutable [`Dataset`] type plus the data-side tooling around it:
//! synthetic generation with a controlled label/attribute joint distribution,
//! CSV ingestion and emission, per-group counting, stratified splitting, and
//! the two pre-processing debiasing baselines (balanced downsampling and
//! inverse-joint reweighting).

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// Feature matrix with one target label and one binary protected attribute
/// per row. Immutable after construction; cheap to share read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<S: Scalar = f64> {
    features: Array2<S>,
    labels: Vec<usize>,
    attributes: Vec<u8>,
    num_classes: usize,
}

impl<S: Scalar> Dataset<S> {
    /// Builds a dataset, validating lengths and value ranges.
    pub fn new(
        features: Array2<S>,
        labels: Vec<usize>,
        attributes: Vec<u8>,
        num_classes: usize,
    ) -> Result<Self> {
        let n = features.nrows();
        if labels.len() != n || attributes.len() != n {
            return Err(Error::Validation(format!(
                "length mismatch: {} feature rows, {} labels, {} attributes",
                n,
                labels.len(),
                attributes.len()
            )));
        }
        if num_classes == 0 {
            return Err(Error::Validation("num_classes must be >= 1".into()));
        }
        if let Some((i, &y)) = labels.iter().enumerate().find(|(_, &y)| y >= num_classes) {
            return Err(Error::Validation(format!(
                "label {y} at row {i} out of range [0, {num_classes})"
            )));
        }
        if let Some((i, &a)) = attributes.iter().enumerate().find(|(_, &a)| a > 1) {
            return Err(Error::Validation(format!(
                "attribute {a} at row {i} is not binary"
            )));
        }
        Ok(Self {
            features,
            labels,
            attributes,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Feature dimension d.
    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn features(&self) -> &Array2<S> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn attributes(&self) -> &[u8] {
        &self.attributes
    }

    /// New dataset containing the given rows, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset<S> {
        Dataset {
            features: self.features.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            attributes: indices.iter().map(|&i| self.attributes[i]).collect(),
            num_classes: self.num_classes,
        }
    }

    /// Row indices grouped by (label, attribute), in file order.
    pub fn group_indices(&self) -> Vec<[Vec<usize>; 2]> {
        let mut groups: Vec<[Vec<usize>; 2]> = vec![[Vec::new(), Vec::new()]; self.num_classes];
        for i in 0..self.len() {
            groups[self.labels[i]][self.attributes[i] as usize].push(i);
        }
        groups
    }

    /// Writes the dataset in the `y,a,f0,...,f{d-1}` CSV format.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = BufWriter::new(writer);
        write!(w, "y,a")?;
        for j in 0..self.dim() {
            write!(w, ",f{j}")?;
        }
        writeln!(w)?;
        for i in 0..self.len() {
            write!(w, "{},{}", self.labels[i], self.attributes[i])?;
            for j in 0..self.dim() {
                write!(w, ",{}", self.features[[i, j]])?;
            }
            writeln!(w)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(file)
    }
}

/// Reads a dataset from the `y,a,f0,...,f{d-1}` CSV format.
///
/// The class count is inferred as `max(label) + 1` unless `num_classes`
/// overrides it. Parse failures name the offending physical line (the header
/// is line 1).
pub fn load_csv<S: Scalar>(path: &Path, num_classes: Option<usize>) -> Result<Dataset<S>> {
    let file = std::fs::File::open(path)?;
    read_csv(BufReader::new(file), num_classes)
}

pub fn read_csv<S: Scalar, R: BufRead>(reader: R, num_classes: Option<usize>) -> Result<Dataset<S>> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "empty file (missing header)".into(),
            })
        }
    };
    let cols: Vec<&str> = header.trim_end().split(',').collect();
    if cols.len() < 3 || cols[0].trim() != "y" || cols[1].trim() != "a" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header must be y,a,f0,...; got `{}`", header.trim_end()),
        });
    }
    let dim = cols.len() - 2;

    let mut labels = Vec::new();
    let mut attributes = Vec::new();
    let mut values: Vec<S> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1; // enumerate starts at the header
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != dim + 2 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected {} fields, got {}", dim + 2, fields.len()),
            });
        }
        let y: usize = fields[0].trim().parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("label `{}` is not a non-negative integer", fields[0]),
        })?;
        if let Some(c) = num_classes {
            if y >= c {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("label {y} out of range [0, {c})"),
                });
            }
        }
        let a: u8 = match fields[1].trim() {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("attribute `{other}` is not 0 or 1"),
                })
            }
        };
        for (j, field) in fields[2..].iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("feature f{j} `{field}` is not numeric"),
            })?;
            values.push(S::from(v).unwrap());
        }
        labels.push(y);
        attributes.push(a);
    }

    if labels.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "no examples (header only)".into(),
        });
    }
    let inferred = labels.iter().copied().max().unwrap() + 1;
    let c = num_classes.unwrap_or(inferred);
    let n = labels.len();
    let features = Array2::from_shape_vec((n, dim), values)
        .map_err(|e| Error::Validation(format!("feature matrix shape: {e}")))?;
    Dataset::new(features, labels, attributes, c)
}

/// Per-(label, attribute) example counts m_{y,a}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupCounts {
    /// `counts[y][a]` = number of examples with label y and attribute a.
    pub counts: Vec<[usize; 2]>,
    pub total: usize,
}

impl GroupCounts {
    pub fn get(&self, y: usize, a: usize) -> usize {
        self.counts[y][a]
    }

    pub fn class_total(&self, y: usize) -> usize {
        self.counts[y][0] + self.counts[y][1]
    }

    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }
}

/// Counts examples per (label, attribute) cell.
pub fn group_counts<S: Scalar>(ds: &Dataset<S>) -> GroupCounts {
    let mut counts = vec![[0usize; 2]; ds.num_classes()];
    for i in 0..ds.len() {
        counts[ds.labels()[i]][ds.attributes()[i] as usize] += 1;
    }
    GroupCounts {
        counts,
        total: ds.len(),
    }
}

/// Recipe for a synthetic dataset with a controlled label/attribute joint.
///
/// Features are Gaussian around a class-dependent mean, with an additional
/// attribute-correlated component of magnitude `attribute_leak` placed on the
/// last feature axis. The class signal lives on the first `dim - 1` axes: for
/// two classes the means sit at +/- `class_separation`/2 on axis 0, so
/// `class_separation` is exactly the distance between the class means.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec<S: Scalar = f64> {
    pub n: usize,
    pub num_classes: usize,
    /// C x 2 matrix of (label, attribute) cell probabilities; sums to 1.
    pub joint: Vec<[f64; 2]>,
    pub class_separation: S,
    pub attribute_leak: S,
    pub noise_std: S,
    pub dim: usize,
    pub seed: u64,
}

impl<S: Scalar> SynthSpec<S> {
    pub fn validate(&self) -> Result<()> {
        if self.joint.len() != self.num_classes {
            return Err(Error::Validation(format!(
                "joint has {} rows for {} classes",
                self.joint.len(),
                self.num_classes
            )));
        }
        let mut sum = 0.0;
        for row in &self.joint {
            for &p in row {
                if p < 0.0 {
                    return Err(Error::Validation(format!("joint entry {p} is negative")));
                }
                sum += p;
            }
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!("joint sums to {sum}, expected 1")));
        }
        if self.noise_std <= S::zero() {
            return Err(Error::Validation("noise_std must be > 0".into()));
        }
        if self.dim < 2 {
            return Err(Error::Validation(
                "dim must be >= 2 (class axis plus leak axis)".into(),
            ));
        }
        Ok(())
    }

    /// Binary-sentiment-like preset: balanced labels and attributes but a
    /// skewed 40/10/10/40 joint, with part of the class signal leaking
    /// through the attribute axis.
    pub fn moji_like(n: usize, seed: u64) -> Self {
        SynthSpec {
            n,
            num_classes: 2,
            joint: vec![[0.10, 0.40], [0.40, 0.10]],
            class_separation: S::from(1.0).unwrap(),
            attribute_leak: S::from(1.6).unwrap(),
            noise_std: S::one(),
            dim: 8,
            seed,
        }
    }

    /// Occupation-like preset: 28 classes with power-law frequencies and a
    /// per-class attribute skew derived deterministically from the seed.
    /// The real per-class ratios are not public, so this is an approximation
    /// with the same shape, not a reproduction.
    pub fn bios_like(n: usize, seed: u64) -> Self {
        let c = 28;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0xb105);
        let freq: Vec<f64> = (0..c).map(|y| 1.0 / (y as f64 + 1.0)).collect();
        let z: f64 = freq.iter().sum();
        let joint: Vec<[f64; 2]> = freq
            .iter()
            .map(|&f| {
                let skew = rng.random_range(0.15..0.85);
                [f / z * (1.0 - skew), f / z * skew]
            })
            .collect();
        SynthSpec {
            n,
            num_classes: c,
            joint,
            class_separation: S::from(2.0).unwrap(),
            attribute_leak: S::from(1.2).unwrap(),
            noise_std: S::one(),
            dim: c + 1,
            seed,
        }
    }

    /// Mean of feature axis `j` for class `y` (before the leak term).
    fn class_mean(&self, y: usize, j: usize) -> S {
        let half = S::from(0.5).unwrap();
        if self.num_classes == 2 {
            if j == 0 {
                let m = self.class_separation * half;
                return if y == 0 { m } else { -m };
            }
            return S::zero();
        }
        let class_axes = self.dim - 1;
        let axis = y % class_axes;
        if j != axis {
            return S::zero();
        }
        // sqrt(2)/2 spacing keeps the distance between classes on distinct
        // axes equal to class_separation.
        let m = self.class_separation / S::from(std::f64::consts::SQRT_2).unwrap();
        if (y / class_axes) % 2 == 0 {
            m
        } else {
            -m
        }
    }
}

/// Draws one dataset realization of the spec. Same spec (including seed)
/// yields a byte-identical dataset.
pub fn generate_synthetic<S: Scalar>(spec: &SynthSpec<S>) -> Result<Dataset<S>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let c = spec.num_classes;
    let d = spec.dim;

    // Flattened cumulative joint for the group draw.
    let mut cum = Vec::with_capacity(c * 2);
    let mut acc = 0.0;
    for row in &spec.joint {
        for &p in row {
            acc += p;
            cum.push(acc);
        }
    }

    let mut labels = Vec::with_capacity(spec.n);
    let mut attributes = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let u: f64 = rng.random();
        let cell = cum.partition_point(|&edge| edge <= u).min(c * 2 - 1);
        labels.push(cell / 2);
        attributes.push((cell % 2) as u8);
    }

    let half = S::from(0.5).unwrap();
    let mut values = Vec::with_capacity(spec.n * d);
    for i in 0..spec.n {
        let y = labels[i];
        let a = S::from(attributes[i]).unwrap();
        for j in 0..d {
            let mut mean = spec.class_mean(y, j);
            if j == d - 1 {
                mean = mean + spec.attribute_leak * (a - half);
            }
            values.push(mean + spec.noise_std * S::standard_normal(&mut rng));
        }
    }

    let features = Array2::from_shape_vec((spec.n, d), values)
        .map_err(|e| Error::Validation(format!("feature matrix shape: {e}")))?;
    Dataset::new(features, labels, attributes, c)
}

/// Balanced-downsampling baseline: within each class, randomly subsamples
/// both attribute groups to the size of the smaller one.
pub fn downsample_balanced<S: Scalar>(ds: &Dataset<S>, seed: u64) -> Result<Dataset<S>> {
    let groups = ds.group_indices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = Vec::new();
    for (y, pair) in groups.iter().enumerate() {
        let (m0, m1) = (pair[0].len(), pair[1].len());
        if m0 + m1 == 0 {
            continue;
        }
        if m0 == 0 || m1 == 0 {
            let a = if m0 == 0 { 0 } else { 1 };
            return Err(Error::EmptyGroup {
                label: y,
                attribute: a,
                context: "cannot balance a class with one empty attribute group".into(),
            });
        }
        let target = m0.min(m1);
        for side in pair {
            let mut idx = side.clone();
            idx.shuffle(&mut rng);
            keep.extend_from_slice(&idx[..target]);
        }
    }
    keep.sort_unstable();
    Ok(ds.subset(&keep))
}

/// Inverse-joint reweighting baseline: weight_i = 1 / (C * |A| * P(y_i, a_i))
/// with P the empirical joint. Balanced data gives all-one weights, and the
/// total weight mass per (label, attribute) group is equal across groups.
pub fn rw_weights<S: Scalar>(ds: &Dataset<S>) -> Array1<S> {
    let counts = group_counts(ds);
    let n = S::from(counts.total).unwrap();
    let cells = S::from(ds.num_classes() * 2).unwrap();
    Array1::from_iter((0..ds.len()).map(|i| {
        let m = counts.get(ds.labels()[i], ds.attributes()[i] as usize);
        n / (cells * S::from(m).unwrap())
    }))
}

/// Largest-remainder allocation of `m` items over `fractions`.
fn allocate_largest_remainder(m: usize, fractions: &[f64]) -> Vec<usize> {
    let mut alloc: Vec<usize> = Vec::with_capacity(fractions.len());
    let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(fractions.len());
    let mut assigned = 0usize;
    for (k, &f) in fractions.iter().enumerate() {
        let quota = m as f64 * f;
        let base = quota.floor() as usize;
        alloc.push(base);
        assigned += base;
        remainders.push((quota - base as f64, k));
    }
    remainders.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    for i in 0..m.saturating_sub(assigned) {
        alloc[remainders[i % remainders.len()].1] += 1;
    }
    alloc
}

/// Splits every (label, attribute) group proportionally across the fractions
/// (largest-remainder rounding), so each split preserves the joint as closely
/// as integer counts allow. Deterministic under `seed`; the splits are
/// disjoint and exhaustive.
pub fn stratified_split<S: Scalar>(
    ds: &Dataset<S>,
    fractions: &[f64],
    seed: u64,
) -> Result<Vec<Dataset<S>>> {
    if fractions.is_empty() {
        return Err(Error::Validation("no fractions given".into()));
    }
    if fractions.iter().any(|&f| f <= 0.0) {
        return Err(Error::Validation("fractions must be positive".into()));
    }
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "fractions sum to {sum}, expected 1"
        )));
    }
    let k = fractions.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split_indices: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (y, pair) in ds.group_indices().iter().enumerate() {
        for (a, side) in pair.iter().enumerate() {
            if side.is_empty() {
                continue;
            }
            if side.len() < k {
                return Err(Error::Validation(format!(
                    "group (label {y}, attribute {a}) has {} examples, fewer than {k} splits",
                    side.len()
                )));
            }
            let mut idx = side.clone();
            idx.shuffle(&mut rng);
            let alloc = allocate_largest_remainder(idx.len(), fractions);
            let mut start = 0;
            for (part, &take) in alloc.iter().enumerate() {
                split_indices[part].extend_from_slice(&idx[start..start + take]);
                start += take;
            }
        }
    }
    Ok(split_indices
        .into_iter()
        .map(|mut idx| {
            idx.sort_unstable();
            ds.subset(&idx)
        })
        .collect())
}

/// Stratified subsample keeping `fraction` of every group (largest-remainder
/// rounding). Errors if a non-empty group would be emptied.
pub fn stratified_subsample<S: Scalar>(
    ds: &Dataset<S>,
    fraction: f64,
    seed: u64,
) -> Result<Dataset<S>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Validation(format!(
            "fraction {fraction} outside (0, 1]"
        )));
    }
    if fraction == 1.0 {
        return Ok(ds.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = Vec::new();
    for (y, pair) in ds.group_indices().iter().enumerate() {
        for (a, side) in pair.iter().enumerate() {
            if side.is_empty() {
                continue;
            }
            let take = allocate_largest_remainder(side.len(), &[fraction, 1.0 - fraction])[0];
            if take == 0 {
                return Err(Error::EmptyGroup {
                    label: y,
                    attribute: a,
                    context: format!("subsampling at fraction {fraction} empties the group"),
                });
            }
            let mut idx = side.clone();
            idx.shuffle(&mut rng);
            keep.extend_from_slice(&idx[..take]);
        }
    }
    keep.sort_unstable();
    Ok(ds.subset(&keep))
}
