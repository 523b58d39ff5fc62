//! TOML run configuration: data source (synthetic recipe or CSV paths),
//! training hyperparameters, and the optional sweep sections. Every key can
//! be overridden by a CLI flag; the seed always comes from `--seed`.

use eqopt::dataset::{generate_synthetic, load_csv, stratified_split, SynthSpec};
use eqopt::harness::{FairBatchUpdate, Method, SweepParam, TrainConfig};
use eqopt::model::Activation;
use eqopt::objectives::ObjectiveKind;
use eqopt::{Dataset, Error, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub data: DataSection,
    #[serde(default)]
    pub train: TrainSection,
    pub sweep: Option<SweepSection>,
    pub sizesweep: Option<SizeSweepSection>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    /// "synth" or "csv".
    #[serde(default = "default_source")]
    pub source: String,
    /// Synthetic preset: "moji" (default) or "bios".
    pub preset: Option<String>,
    pub n: Option<usize>,
    pub classes: Option<usize>,
    /// C x 2 label/attribute cell probabilities; implies `classes`.
    pub joint: Option<Vec<Vec<f64>>>,
    pub class_separation: Option<f64>,
    pub attribute_leak: Option<f64>,
    pub noise_std: Option<f64>,
    pub dim: Option<usize>,
    /// Train/dev/test fractions for splitting a single dataset.
    #[serde(default = "default_split")]
    pub split: Vec<f64>,
    /// CSV mode: either three explicit files...
    pub train: Option<PathBuf>,
    pub dev: Option<PathBuf>,
    pub test: Option<PathBuf>,
    /// ...or one file that gets split.
    pub path: Option<PathBuf>,
}

fn default_source() -> String {
    "synth".into()
}

fn default_split() -> Vec<f64> {
    vec![0.7, 0.15, 0.15]
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection {
            source: default_source(),
            preset: None,
            n: None,
            classes: None,
            joint: None,
            class_separation: None,
            attribute_leak: None,
            noise_std: None,
            dim: None,
            split: default_split(),
            train: None,
            dev: None,
            test: None,
            path: None,
        }
    }
}

impl DataSection {
    /// Resolves the synthetic spec (preset plus overrides) for `--seed`.
    pub fn synth_spec(&self, seed: u64) -> Result<SynthSpec<f64>> {
        if self.source != "synth" {
            return Err(Error::Config(format!(
                "data source is `{}`, not `synth`",
                self.source
            )));
        }
        let n = self.n.unwrap_or(20_000);
        let mut spec = match self.preset.as_deref() {
            None | Some("moji") => SynthSpec::moji_like(n, seed),
            Some("bios") => SynthSpec::bios_like(n, seed),
            Some(other) => {
                return Err(Error::Config(format!("unknown preset `{other}`")));
            }
        };
        if let Some(joint) = &self.joint {
            let rows: Vec<[f64; 2]> = joint
                .iter()
                .map(|row| {
                    <[f64; 2]>::try_from(row.as_slice()).map_err(|_| {
                        Error::Config("each joint row needs exactly two entries".into())
                    })
                })
                .collect::<Result<_>>()?;
            spec.num_classes = rows.len();
            spec.joint = rows;
        }
        if let Some(c) = self.classes {
            if c != spec.num_classes {
                return Err(Error::Config(format!(
                    "classes = {c} does not match the {}-row joint",
                    spec.num_classes
                )));
            }
        }
        if let Some(v) = self.class_separation {
            spec.class_separation = v;
        }
        if let Some(v) = self.attribute_leak {
            spec.attribute_leak = v;
        }
        if let Some(v) = self.noise_std {
            spec.noise_std = v;
        }
        if let Some(v) = self.dim {
            spec.dim = v;
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Produces the (train, dev, test) datasets for `--seed`.
    pub fn build(&self, seed: u64) -> Result<(Dataset, Dataset, Dataset)> {
        match self.source.as_str() {
            "synth" => {
                let ds = generate_synthetic(&self.synth_spec(seed)?)?;
                self.split_three(ds, seed)
            }
            "csv" => {
                if let (Some(train), Some(dev), Some(test)) = (&self.train, &self.dev, &self.test)
                {
                    let train: Dataset = load_csv(train, self.classes)?;
                    let c = Some(train.num_classes());
                    let dev = load_csv(dev, c)?;
                    let test = load_csv(test, c)?;
                    Ok((train, dev, test))
                } else if let Some(path) = &self.path {
                    let ds = load_csv(path, self.classes)?;
                    self.split_three(ds, seed)
                } else {
                    Err(Error::Config(
                        "csv source needs either train/dev/test paths or a single path".into(),
                    ))
                }
            }
            other => Err(Error::Config(format!("unknown data source `{other}`"))),
        }
    }

    fn split_three(&self, ds: Dataset, seed: u64) -> Result<(Dataset, Dataset, Dataset)> {
        if self.split.len() != 3 {
            return Err(Error::Config(format!(
                "split needs 3 fractions, got {}",
                self.split.len()
            )));
        }
        let mut parts = stratified_split(&ds, &self.split, seed.wrapping_add(1))?.into_iter();
        Ok((
            parts.next().unwrap(),
            parts.next().unwrap(),
            parts.next().unwrap(),
        ))
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub objective: Option<String>,
    pub lambda: Option<f64>,
    pub method: Option<String>,
    pub alpha: Option<f64>,
    pub lr: Option<f64>,
    pub batch_size: Option<usize>,
    pub max_epochs: Option<usize>,
    pub patience: Option<usize>,
    pub hidden: Option<usize>,
    pub selection_eps: Option<f64>,
    pub activation: Option<String>,
    pub fairbatch_update: Option<String>,
}

impl TrainSection {
    /// Folds defaults <- config file <- CLI overrides into a TrainConfig.
    pub fn resolve(&self, overrides: &TrainSection, seed: u64) -> Result<TrainConfig> {
        let pick = |a: &Option<String>, b: &Option<String>| -> Option<String> {
            a.clone().or_else(|| b.clone())
        };
        let mut cfg = TrainConfig {
            seed,
            ..TrainConfig::default()
        };
        if let Some(s) = pick(&overrides.objective, &self.objective) {
            cfg.objective = s.parse::<ObjectiveKind>()?;
        }
        cfg.lambda = overrides.lambda.or(self.lambda);
        if let Some(s) = pick(&overrides.method, &self.method) {
            cfg.method = s.parse::<Method>()?;
        }
        cfg.alpha = overrides.alpha.or(self.alpha);
        if let Some(v) = overrides.lr.or(self.lr) {
            cfg.lr = v;
        }
        if let Some(v) = overrides.batch_size.or(self.batch_size) {
            cfg.batch_size = v;
        }
        if let Some(v) = overrides.max_epochs.or(self.max_epochs) {
            cfg.max_epochs = v;
        }
        if let Some(v) = overrides.patience.or(self.patience) {
            cfg.patience = v;
        }
        if let Some(v) = overrides.hidden.or(self.hidden) {
            cfg.hidden = v;
        }
        if let Some(v) = overrides.selection_eps.or(self.selection_eps) {
            cfg.selection_eps = v;
        }
        if let Some(s) = pick(&overrides.activation, &self.activation) {
            cfg.activation = s.parse::<Activation>()?;
        }
        if let Some(s) = pick(&overrides.fairbatch_update, &self.fairbatch_update) {
            cfg.fairbatch_update = match s.as_str() {
                "epoch" => FairBatchUpdate::Epoch,
                "batch" => FairBatchUpdate::Batch,
                other => {
                    return Err(Error::Config(format!(
                        "fairbatch_update must be epoch or batch, got `{other}`"
                    )))
                }
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_param")]
    pub param: String,
    pub values: Vec<f64>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
}

fn default_param() -> String {
    "lambda".into()
}

fn default_repeats() -> usize {
    3
}

impl SweepSection {
    pub fn param(&self) -> Result<SweepParam> {
        self.param.parse()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeSweepSection {
    pub fractions: Vec<f64>,
}
