//! Training orchestration: single runs with early stopping and dev-based
//! model selection, hyperparameter sweeps with repeat aggregation,
//! training-size studies, Pareto-frontier extraction, and report emission.

mod report;

pub use report::{
    emit_report, read_json, series_label, write_csv, write_json, write_size_csv,
    write_size_json, write_svg, ReportFormat,
};

use crate::dataset::{
    downsample_balanced, group_counts, rw_weights, stratified_subsample, Dataset,
};
use crate::error::{Error, Result};
use crate::fairbatch::{init_sampler, sample_batch, update_probs, SamplerState};
use crate::metrics::{confusion, report as metrics_report, FairnessReport};
use crate::model::{
    adam_step, backward, forward, init_params, Activation, AdamHyperParams, ModelParams,
    OptimState,
};
use crate::objectives::{effective_weights, group_losses, ObjectiveKind, ObjectiveSpec};
use crate::scalar::Scalar;
use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Debiasing method applied around the objective. Each run uses exactly one
/// mitigation: a non-CE objective requires `Plain`, and the dataset-level
/// methods require the CE objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Plain,
    Ds,
    Rw,
    FairBatch,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Plain => "plain",
            Method::Ds => "ds",
            Method::Rw => "rw",
            Method::FairBatch => "fairbatch",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Method::Plain),
            "ds" => Ok(Method::Ds),
            "rw" => Ok(Method::Rw),
            "fairbatch" => Ok(Method::FairBatch),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

/// When the FairBatch sampler adapts its probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FairBatchUpdate {
    #[default]
    Epoch,
    Batch,
}

/// One run's hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub objective: ObjectiveKind,
    /// Penalty weight; required for every objective other than `ce`.
    pub lambda: Option<f64>,
    pub method: Method,
    /// FairBatch step size; required for `method = fairbatch`.
    pub alpha: Option<f64>,
    pub lr: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub hidden: usize,
    /// Accuracy slack used by dev-based run selection.
    pub selection_eps: f64,
    pub seed: u64,
    pub activation: Activation,
    pub fairbatch_update: FairBatchUpdate,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            objective: ObjectiveKind::Ce,
            lambda: None,
            method: Method::Plain,
            alpha: None,
            lr: 3e-3,
            batch_size: 2048,
            max_epochs: 60,
            patience: 5,
            hidden: 300,
            selection_eps: 0.01,
            seed: 0,
            activation: Activation::Tanh,
            fairbatch_update: FairBatchUpdate::Epoch,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_epochs < 1 || self.patience < 1 {
            return Err(Error::Config(
                "max_epochs and patience must be >= 1".into(),
            ));
        }
        if self.batch_size < 1 || self.hidden < 1 {
            return Err(Error::Config("batch_size and hidden must be >= 1".into()));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Config(format!("lr must be > 0, got {}", self.lr)));
        }
        if self.selection_eps < 0.0 {
            return Err(Error::Config("selection_eps must be >= 0".into()));
        }
        if self.objective != ObjectiveKind::Ce {
            match self.lambda {
                Some(l) if l >= 0.0 && l.is_finite() => {}
                Some(l) => {
                    return Err(Error::Config(format!("lambda must be >= 0, got {l}")));
                }
                None => {
                    return Err(Error::Config(format!(
                        "objective `{}` requires lambda",
                        self.objective.as_str()
                    )));
                }
            }
            if self.method != Method::Plain {
                return Err(Error::Config(
                    "a non-ce objective is itself a debiasing method; use method = plain".into(),
                ));
            }
        }
        if self.method == Method::FairBatch {
            match self.alpha {
                Some(a) if a > 0.0 && a < 1.0 => {}
                Some(a) => {
                    return Err(Error::Config(format!("alpha must be in (0, 1), got {a}")));
                }
                None => return Err(Error::Config("method fairbatch requires alpha".into())),
            }
        }
        Ok(())
    }

    fn objective_spec<S: Scalar>(&self) -> Result<ObjectiveSpec<S>> {
        ObjectiveSpec::new(
            self.objective,
            S::from(self.lambda.unwrap_or(0.0)).unwrap(),
        )
    }
}

/// Stops training when the dev metric has not strictly improved for
/// `patience` consecutive epochs.
#[derive(Debug, Clone)]
pub struct EarlyStopper {
    patience: usize,
    best: f64,
    best_epoch: usize,
    bad_epochs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopDecision {
    Improved,
    Continue,
    Stop,
}

impl EarlyStopper {
    pub fn new(patience: usize) -> Self {
        EarlyStopper {
            patience,
            best: f64::NEG_INFINITY,
            best_epoch: 0,
            bad_epochs: 0,
        }
    }

    pub fn observe(&mut self, epoch: usize, metric: f64) -> StopDecision {
        if metric > self.best {
            self.best = metric;
            self.best_epoch = epoch;
            self.bad_epochs = 0;
            StopDecision::Improved
        } else {
            self.bad_epochs += 1;
            if self.bad_epochs >= self.patience {
                StopDecision::Stop
            } else {
                StopDecision::Continue
            }
        }
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }
}

/// Dev metrics recorded after one epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochDev {
    pub epoch: usize,
    pub dev: FairnessReport,
}

/// Everything produced by one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: TrainConfig,
    pub epoch_dev: Vec<EpochDev>,
    /// Dev metrics of the selected (dev-best) epoch.
    pub dev: FairnessReport,
    /// Test metrics of the selected checkpoint, computed once.
    pub test: FairnessReport,
    pub epochs_run: usize,
    pub selected_epoch: usize,
}

fn argmax_rows<S: Scalar>(logits: &Array2<S>) -> Vec<usize> {
    logits
        .rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for (j, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Evaluates a model on a dataset: argmax predictions, then the shared
/// metrics path used for every method and objective.
pub fn evaluate<S: Scalar>(
    params: &ModelParams<S>,
    ds: &Dataset<S>,
    act: Activation,
) -> Result<FairnessReport> {
    let fwd = forward(params, ds.features(), ds.labels(), act)?;
    let preds = argmax_rows(&fwd.logits);
    let conf = confusion(&preds, ds.labels(), ds.attributes(), ds.num_classes())?;
    metrics_report(&conf)
}

fn check_compatible<S: Scalar>(
    train_set: &Dataset<S>,
    dev_set: &Dataset<S>,
    test_set: &Dataset<S>,
) -> Result<()> {
    if train_set.is_empty() {
        return Err(Error::Validation("training set is empty".into()));
    }
    for (name, ds) in [("dev", dev_set), ("test", test_set)] {
        if ds.dim() != train_set.dim() || ds.num_classes() != train_set.num_classes() {
            return Err(Error::Validation(format!(
                "{name} set shape ({} features, {} classes) does not match train ({}, {})",
                ds.dim(),
                ds.num_classes(),
                train_set.dim(),
                train_set.num_classes()
            )));
        }
    }
    Ok(())
}

/// Trains one model and returns the run record together with the selected
/// parameters. Fully deterministic given the config (including its seed).
pub fn train_with_model<S: Scalar>(
    config: &TrainConfig,
    train_set: &Dataset<S>,
    dev_set: &Dataset<S>,
    test_set: &Dataset<S>,
) -> Result<(RunResult, ModelParams<S>)> {
    config.validate()?;
    check_compatible(train_set, dev_set, test_set)?;
    let act = config.activation;
    let objective = config.objective_spec::<S>()?;

    let downsampled;
    let train_set = if config.method == Method::Ds {
        downsampled = downsample_balanced(train_set, config.seed)?;
        &downsampled
    } else {
        train_set
    };
    let static_weights = (config.method == Method::Rw).then(|| rw_weights(train_set));

    let n = train_set.len();
    let c = train_set.num_classes();
    let batch_size = config.batch_size.min(n);
    let batches_per_epoch = n.div_ceil(batch_size);

    let mut params = init_params::<S>(train_set.dim(), config.hidden, c, config.seed);
    let mut optim = OptimState::new(&params);
    let hp = AdamHyperParams::with_lr(S::from(config.lr).unwrap());

    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed);
    shuffle_rng.set_stream(1);
    let mut sampler_rng = ChaCha8Rng::seed_from_u64(config.seed);
    sampler_rng.set_stream(2);

    let groups = train_set.group_indices();
    let mut sampler: Option<SamplerState<S>> = if config.method == Method::FairBatch {
        let alpha = S::from(config.alpha.unwrap()).unwrap();
        Some(init_sampler(&group_counts(train_set), alpha)?)
    } else {
        None
    };

    let mut order: Vec<usize> = (0..n).collect();
    let mut stopper = EarlyStopper::new(config.patience);
    let mut best_params = params.clone();
    let mut epoch_dev = Vec::new();
    let mut epochs_run = 0;

    for epoch in 1..=config.max_epochs {
        epochs_run = epoch;
        let batches: Vec<Vec<usize>> = match &sampler {
            None => {
                order.shuffle(&mut shuffle_rng);
                order.chunks(batch_size).map(|c| c.to_vec()).collect()
            }
            Some(state) => (0..batches_per_epoch)
                .map(|_| sample_batch(state, &groups, batch_size, &mut sampler_rng))
                .collect::<Result<_>>()?,
        };

        for idx in &batches {
            let x = train_set.features().select(Axis(0), idx);
            let y: Vec<usize> = idx.iter().map(|&i| train_set.labels()[i]).collect();
            let a: Vec<u8> = idx.iter().map(|&i| train_set.attributes()[i]).collect();
            let fwd = forward(&params, &x, &y, act)?;
            let table = group_losses(&fwd.per_example_ce, &y, &a, c)?;
            let ew = effective_weights(&table, &objective, &y, &a)?;
            let mut weights = ew.per_example;
            if let Some(rw) = &static_weights {
                for (k, &i) in idx.iter().enumerate() {
                    weights[k] = weights[k] * rw[i];
                }
            }
            let grads = backward(&params, &x, &y, &weights, act)?;
            adam_step(&mut params, &grads, &mut optim, &hp);

            if config.fairbatch_update == FairBatchUpdate::Batch {
                if let Some(state) = sampler.as_mut() {
                    update_probs(state, &table);
                }
            }
        }

        if config.fairbatch_update == FairBatchUpdate::Epoch {
            if let Some(state) = sampler.as_mut() {
                let fwd = forward(&params, train_set.features(), train_set.labels(), act)?;
                let table = group_losses(
                    &fwd.per_example_ce,
                    train_set.labels(),
                    train_set.attributes(),
                    c,
                )?;
                update_probs(state, &table);
            }
        }

        let dev = evaluate(&params, dev_set, act)?;
        let decision = stopper.observe(epoch, dev.f1_micro);
        epoch_dev.push(EpochDev { epoch, dev });
        match decision {
            StopDecision::Improved => best_params = params.clone(),
            StopDecision::Continue => {}
            StopDecision::Stop => break,
        }
    }

    let selected_epoch = stopper.best_epoch();
    let dev = epoch_dev[selected_epoch - 1].dev.clone();
    let test = evaluate(&best_params, test_set, act)?;
    let result = RunResult {
        config: config.clone(),
        epoch_dev,
        dev,
        test,
        epochs_run,
        selected_epoch,
    };
    Ok((result, best_params))
}

/// [`train_with_model`] without the parameters.
pub fn train<S: Scalar>(
    config: &TrainConfig,
    train_set: &Dataset<S>,
    dev_set: &Dataset<S>,
    test_set: &Dataset<S>,
) -> Result<RunResult> {
    train_with_model(config, train_set, dev_set, test_set).map(|(r, _)| r)
}

/// Dev-based run selection: among runs whose dev micro-F1 is within `eps` of
/// the best, picks the one with the lowest dev GAP; ties break toward higher
/// F1, then lower lambda.
pub fn select_run<'a>(results: &'a [RunResult], eps: f64) -> &'a RunResult {
    assert!(!results.is_empty(), "select_run needs at least one run");
    let best = results
        .iter()
        .map(|r| r.dev.f1_micro)
        .fold(f64::NEG_INFINITY, f64::max);
    results
        .iter()
        .filter(|r| r.dev.f1_micro >= best - eps)
        .min_by(|a, b| {
            a.dev
                .gap
                .partial_cmp(&b.dev.gap)
                .unwrap()
                .then(b.dev.f1_micro.partial_cmp(&a.dev.f1_micro).unwrap())
                .then(
                    a.config
                        .lambda
                        .unwrap_or(0.0)
                        .partial_cmp(&b.config.lambda.unwrap_or(0.0))
                        .unwrap(),
                )
        })
        .unwrap()
}

/// Which hyperparameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Lambda,
    Alpha,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(SweepParam::Lambda),
            "alpha" => Ok(SweepParam::Alpha),
            other => Err(Error::Config(format!("unknown sweep parameter `{other}`"))),
        }
    }
}

/// One training run per (value, repeat); repeat seeds are offset from the
/// base seed so the whole sweep is reproducible.
pub fn sweep<S: Scalar>(
    base: &TrainConfig,
    param: SweepParam,
    values: &[f64],
    repeats: usize,
    train_set: &Dataset<S>,
    dev_set: &Dataset<S>,
    test_set: &Dataset<S>,
) -> Result<Vec<RunResult>> {
    if values.is_empty() {
        return Err(Error::Validation("sweep needs at least one value".into()));
    }
    if repeats == 0 {
        return Err(Error::Validation("repeats must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(values.len() * repeats);
    for &value in values {
        for r in 0..repeats {
            let mut cfg = base.clone();
            match param {
                SweepParam::Lambda => cfg.lambda = Some(value),
                SweepParam::Alpha => cfg.alpha = Some(value),
            }
            cfg.seed = base.seed.wrapping_add(r as u64);
            out.push(train(&cfg, train_set, dev_set, test_set)?);
        }
    }
    Ok(out)
}

/// Mean and standard deviation (computed with divisor n) of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

pub fn mean_std(values: &[f64]) -> MeanStd {
    assert!(!values.is_empty());
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    MeanStd {
        mean,
        std: var.sqrt(),
    }
}

/// Repeat-aggregated metrics for one swept value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub value: f64,
    pub runs: usize,
    pub dev_f1_micro: MeanStd,
    pub dev_gap: MeanStd,
    pub test_f1_micro: MeanStd,
    pub test_f1_macro: MeanStd,
    pub test_gap: MeanStd,
}

/// Groups sweep results by the swept value (in first-seen order) and
/// aggregates each group.
pub fn aggregate(results: &[RunResult], param: SweepParam) -> Vec<Aggregate> {
    let value_of = |r: &RunResult| match param {
        SweepParam::Lambda => r.config.lambda.unwrap_or(0.0),
        SweepParam::Alpha => r.config.alpha.unwrap_or(0.0),
    };
    let mut order: Vec<f64> = Vec::new();
    for r in results {
        let v = value_of(r);
        if !order.contains(&v) {
            order.push(v);
        }
    }
    order
        .into_iter()
        .map(|v| {
            let group: Vec<&RunResult> =
                results.iter().filter(|r| value_of(r) == v).collect();
            let col = |f: &dyn Fn(&RunResult) -> f64| {
                mean_std(&group.iter().map(|r| f(r)).collect::<Vec<_>>())
            };
            Aggregate {
                value: v,
                runs: group.len(),
                dev_f1_micro: col(&|r| r.dev.f1_micro),
                dev_gap: col(&|r| r.dev.gap),
                test_f1_micro: col(&|r| r.test.f1_micro),
                test_f1_macro: col(&|r| r.test.f1_macro),
                test_gap: col(&|r| r.test.gap),
            }
        })
        .collect()
}

/// [`select_run`]'s rule applied to aggregated sweep rows.
pub fn select_aggregate<'a>(aggregates: &'a [Aggregate], eps: f64) -> &'a Aggregate {
    assert!(!aggregates.is_empty());
    let best = aggregates
        .iter()
        .map(|a| a.dev_f1_micro.mean)
        .fold(f64::NEG_INFINITY, f64::max);
    aggregates
        .iter()
        .filter(|a| a.dev_f1_micro.mean >= best - eps)
        .min_by(|a, b| {
            a.dev_gap
                .mean
                .partial_cmp(&b.dev_gap.mean)
                .unwrap()
                .then(b.dev_f1_micro.mean.partial_cmp(&a.dev_f1_micro.mean).unwrap())
                .then(a.value.partial_cmp(&b.value).unwrap())
        })
        .unwrap()
}

/// A run's position in the performance-fairness plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    /// Task performance (higher is better), e.g. micro-F1.
    pub performance: f64,
    /// Fairness gap (lower is better).
    pub gap: f64,
    pub key: String,
}

fn pareto_order(a: &ParetoPoint, b: &ParetoPoint) -> std::cmp::Ordering {
    a.performance
        .partial_cmp(&b.performance)
        .unwrap()
        .then(a.gap.partial_cmp(&b.gap).unwrap())
        .then(a.key.cmp(&b.key))
}

/// Maximal non-dominated subset: a point survives unless another point has
/// performance >= and gap <= with at least one strict. Returned sorted by
/// ascending performance.
pub fn pareto_front(points: &[ParetoPoint]) -> Vec<ParetoPoint> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    // Descending performance, ascending gap.
    idx.sort_by(|&i, &j| {
        points[j]
            .performance
            .partial_cmp(&points[i].performance)
            .unwrap()
            .then(points[i].gap.partial_cmp(&points[j].gap).unwrap())
    });
    let mut out: Vec<ParetoPoint> = Vec::new();
    let mut best_gap_above = f64::INFINITY;
    let mut k = 0;
    while k < idx.len() {
        let mut j = k;
        while j + 1 < idx.len()
            && points[idx[j + 1]].performance == points[idx[k]].performance
        {
            j += 1;
        }
        let group_min_gap = points[idx[k]].gap;
        if group_min_gap < best_gap_above {
            for &i in &idx[k..=j] {
                if points[i].gap == group_min_gap {
                    out.push(points[i].clone());
                }
            }
            best_gap_above = group_min_gap;
        }
        k = j + 1;
    }
    out.sort_by(pareto_order);
    out
}

/// A run's Pareto coordinates from its test metrics.
pub fn pareto_point(result: &RunResult, key: impl Into<String>) -> ParetoPoint {
    ParetoPoint {
        performance: result.test.f1_micro,
        gap: result.test.gap,
        key: key.into(),
    }
}

/// Training-size study row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSweepRow {
    pub fraction: f64,
    pub train_size: usize,
    pub result: RunResult,
}

/// Trains once per fraction on a stratified subsample of the training set.
/// Fraction 1.0 reuses the full set unchanged.
pub fn size_sweep<S: Scalar>(
    base: &TrainConfig,
    fractions: &[f64],
    train_set: &Dataset<S>,
    dev_set: &Dataset<S>,
    test_set: &Dataset<S>,
) -> Result<Vec<SizeSweepRow>> {
    if fractions.is_empty() {
        return Err(Error::Validation("size sweep needs fractions".into()));
    }
    let mut rows = Vec::with_capacity(fractions.len());
    for (k, &fraction) in fractions.iter().enumerate() {
        let sub = stratified_subsample(train_set, fraction, base.seed.wrapping_add(k as u64))?;
        let result = train(base, &sub, dev_set, test_set)?;
        rows.push(SizeSweepRow {
            fraction,
            train_size: sub.len(),
            result,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synthetic, stratified_split, SynthSpec};

    fn quick_datasets() -> (Dataset, Dataset, Dataset) {
        let mut spec = SynthSpec::<f64>::moji_like(600, 5);
        spec.dim = 3;
        let ds = generate_synthetic(&spec).unwrap();
        let mut parts = stratified_split(&ds, &[0.6, 0.2, 0.2], 7).unwrap().into_iter();
        (
            parts.next().unwrap(),
            parts.next().unwrap(),
            parts.next().unwrap(),
        )
    }

    fn quick_config() -> TrainConfig {
        TrainConfig {
            batch_size: 128,
            max_epochs: 4,
            hidden: 8,
            seed: 3,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn stopping_rule_trace() {
        let mut stopper = EarlyStopper::new(5);
        let metrics = [1.0, 2.0, 3.0, 3.0, 3.0, 3.0, 3.0, 3.0];
        let mut stopped_at = None;
        for (i, &m) in metrics.iter().enumerate() {
            if stopper.observe(i + 1, m) == StopDecision::Stop {
                stopped_at = Some(i + 1);
                break;
            }
        }
        assert_eq!(stopped_at, Some(8));
        assert_eq!(stopper.best_epoch(), 3);
    }

    #[test]
    fn single_epoch_bound() {
        let (tr, dev, te) = quick_datasets();
        let cfg = TrainConfig {
            max_epochs: 1,
            ..quick_config()
        };
        let run = train(&cfg, &tr, &dev, &te).unwrap();
        assert_eq!(run.epochs_run, 1);
        assert_eq!(run.selected_epoch, 1);
    }

    #[test]
    fn train_is_deterministic() {
        let (tr, dev, te) = quick_datasets();
        let cfg = quick_config();
        let a = train(&cfg, &tr, &dev, &te).unwrap();
        let b = train(&cfg, &tr, &dev, &te).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_combinations_rejected() {
        let bad = TrainConfig {
            objective: ObjectiveKind::EoCla,
            lambda: None,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            method: Method::FairBatch,
            alpha: None,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            objective: ObjectiveKind::EoCla,
            lambda: Some(0.5),
            method: Method::Rw,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            method: Method::FairBatch,
            alpha: Some(1.5),
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    fn result_with(f1: f64, gap: f64, lambda: f64) -> RunResult {
        let rep = |f1: f64, gap: f64| FairnessReport {
            per_class_gap: vec![Some(gap)],
            gap,
            f1_micro: f1,
            f1_macro: f1,
            accuracy: f1,
            excluded_classes: vec![],
        };
        RunResult {
            config: TrainConfig {
                objective: ObjectiveKind::EoCla,
                lambda: Some(lambda),
                ..TrainConfig::default()
            },
            epoch_dev: vec![],
            dev: rep(f1, gap),
            test: rep(f1, gap),
            epochs_run: 1,
            selected_epoch: 1,
        }
    }

    #[test]
    fn select_run_rule_trace() {
        let results = vec![
            result_with(0.760, 0.15, 0.1),
            result_with(0.755, 0.11, 0.5),
            result_with(0.700, 0.05, 1.0),
        ];
        let picked = select_run(&results, 0.01);
        assert_eq!(picked.dev.f1_micro, 0.755);
        assert_eq!(picked.dev.gap, 0.11);
    }

    #[test]
    fn select_run_single_and_zero_eps() {
        let one = vec![result_with(0.7, 0.2, 0.0)];
        assert_eq!(select_run(&one, 0.01).dev.f1_micro, 0.7);
        let results = vec![result_with(0.8, 0.3, 0.0), result_with(0.75, 0.01, 0.5)];
        assert_eq!(select_run(&results, 0.0).dev.f1_micro, 0.8);
    }

    #[test]
    fn mean_std_hand_value() {
        let ms = mean_std(&[10.0, 12.0]);
        assert_eq!(ms.mean, 11.0);
        assert_eq!(ms.std, 1.0);
    }

    #[test]
    fn pareto_front_examples() {
        let p = |performance: f64, gap: f64| ParetoPoint {
            performance,
            gap,
            key: format!("{performance}/{gap}"),
        };
        let front = pareto_front(&[p(72.0, 40.0), p(75.0, 10.0), p(74.0, 15.0)]);
        assert_eq!(front.len(), 1);
        assert_eq!(front[0].performance, 75.0);

        let front = pareto_front(&[p(70.0, 5.0), p(80.0, 20.0)]);
        assert_eq!(front.len(), 2);

        let single = pareto_front(&[p(50.0, 1.0)]);
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn sweep_counts_and_aggregation() {
        let (tr, dev, te) = quick_datasets();
        let base = TrainConfig {
            objective: ObjectiveKind::EoCla,
            lambda: Some(0.5),
            max_epochs: 2,
            ..quick_config()
        };
        let runs = sweep(&base, SweepParam::Lambda, &[0.1, 0.5], 2, &tr, &dev, &te).unwrap();
        assert_eq!(runs.len(), 4);
        let aggs = aggregate(&runs, SweepParam::Lambda);
        assert_eq!(aggs.len(), 2);
        assert_eq!(aggs[0].value, 0.1);
        assert_eq!(aggs[0].runs, 2);
    }

    #[test]
    fn size_sweep_identity_fraction() {
        let (tr, dev, te) = quick_datasets();
        let cfg = TrainConfig {
            max_epochs: 2,
            ..quick_config()
        };
        let rows = size_sweep(&cfg, &[1.0], &tr, &dev, &te).unwrap();
        assert_eq!(rows[0].train_size, tr.len());
        let direct = train(&cfg, &tr, &dev, &te).unwrap();
        assert_eq!(rows[0].result, direct);
    }
}
