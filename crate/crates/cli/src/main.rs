//! `eqopt` command line: synthetic data emission, single training runs,
//! hyperparameter and training-size sweeps, and report regeneration.
//!
//! Every run is a pure function of the config file plus `--seed`; identical
//! invocations produce byte-identical outputs. Failures print
//! `error[<category>]: <message>` and exit with a category-specific code.

mod config;

use clap::{Args, Parser, Subcommand};
use config::{FileConfig, TrainSection};
use eqopt::harness::{
    aggregate, emit_report, read_json, select_aggregate, size_sweep, sweep, train_with_model,
    write_size_csv, write_size_json, ReportFormat, SweepParam,
};
use eqopt::{Error, Result};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "eqopt", version, about = "Fairness-constrained classifier training")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a synthetic dataset as CSV
    Synth {
        #[command(flatten)]
        common: Common,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one model and report dev/test metrics
    Train {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: TrainFlags,
        /// Write the full run record as JSON
        #[arg(long)]
        out: Option<PathBuf>,
        /// Save the selected model checkpoint
        #[arg(long)]
        save_model: Option<PathBuf>,
    },
    /// Train across a grid of lambda (or alpha) values with repeats
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: TrainFlags,
        /// Directory for runs.csv, runs.json and scatter.svg
        #[arg(long)]
        out_dir: PathBuf,
        /// Swept parameter: lambda or alpha
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated grid values
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Seed-offset repeats per value
        #[arg(long)]
        repeats: Option<usize>,
    },
    /// Train on stratified subsamples of the training set
    Sizesweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: TrainFlags,
        #[arg(long)]
        out_dir: PathBuf,
        /// Comma-separated training-set fractions in (0, 1]
        #[arg(long, value_delimiter = ',')]
        fractions: Option<Vec<f64>>,
    },
    /// Re-emit reports from a saved runs.json
    Report {
        /// Runs JSON produced by `train --out` or `sweep`
        #[arg(long)]
        runs: PathBuf,
        /// csv, json or svg-scatter
        #[arg(long)]
        format: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Master seed; all randomness derives from it
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    data: DataFlags,
}

/// CLI overrides for the `[data]` section.
#[derive(Args)]
struct DataFlags {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    class_separation: Option<f64>,
    #[arg(long)]
    attribute_leak: Option<f64>,
    #[arg(long)]
    noise_std: Option<f64>,
    #[arg(long)]
    preset: Option<String>,
}

/// CLI overrides for the `[train]` section.
#[derive(Args, Default)]
struct TrainFlags {
    #[arg(long)]
    objective: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    max_epochs: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    selection_eps: Option<f64>,
    #[arg(long)]
    activation: Option<String>,
    #[arg(long)]
    fairbatch_update: Option<String>,
}

impl TrainFlags {
    fn as_section(&self) -> TrainSection {
        TrainSection {
            objective: self.objective.clone(),
            lambda: self.lambda,
            method: self.method.clone(),
            alpha: self.alpha,
            lr: self.lr,
            batch_size: self.batch_size,
            max_epochs: self.max_epochs,
            patience: self.patience,
            hidden: self.hidden,
            selection_eps: self.selection_eps,
            activation: self.activation.clone(),
            fairbatch_update: self.fairbatch_update.clone(),
        }
    }
}

fn load_with_overrides(common: &Common) -> Result<FileConfig> {
    let mut file = FileConfig::load(&common.config)?;
    let d = &common.data;
    if let Some(v) = d.n {
        file.data.n = Some(v);
    }
    if let Some(v) = d.dim {
        file.data.dim = Some(v);
    }
    if let Some(v) = d.class_separation {
        file.data.class_separation = Some(v);
    }
    if let Some(v) = d.attribute_leak {
        file.data.attribute_leak = Some(v);
    }
    if let Some(v) = d.noise_std {
        file.data.noise_std = Some(v);
    }
    if let Some(v) = &d.preset {
        file.data.preset = Some(v.clone());
    }
    Ok(file)
}

fn pct(v: f64) -> f64 {
    100.0 * v
}

fn run() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Synth { common, out } => {
            let file = load_with_overrides(&common)?;
            let spec = file.data.synth_spec(common.seed)?;
            let ds = eqopt::dataset::generate_synthetic(&spec)?;
            ds.save_csv(&out)?;
            println!(
                "wrote {} examples ({} features, {} classes) to {}",
                ds.len(),
                ds.dim(),
                ds.num_classes(),
                out.display()
            );
        }
        Cmd::Train {
            common,
            train,
            out,
            save_model,
        } => {
            let file = load_with_overrides(&common)?;
            let cfg = file.train.resolve(&train.as_section(), common.seed)?;
            let (train_set, dev_set, test_set) = file.data.build(common.seed)?;
            let (result, params) = train_with_model(&cfg, &train_set, &dev_set, &test_set)?;
            println!(
                "{} selected epoch {}/{} | dev F1 {:.2} GAP {:.2} | test F1 {:.2} GAP {:.2}",
                eqopt::harness::series_label(&result),
                result.selected_epoch,
                result.epochs_run,
                pct(result.dev.f1_micro),
                pct(result.dev.gap),
                pct(result.test.f1_micro),
                pct(result.test.gap),
            );
            if let Some(path) = out {
                emit_report(std::slice::from_ref(&result), &path, ReportFormat::Json)?;
                println!("run record: {}", path.display());
            }
            if let Some(path) = save_model {
                params.save_checkpoint(&path)?;
                println!("checkpoint: {}", path.display());
            }
        }
        Cmd::Sweep {
            common,
            train,
            out_dir,
            param,
            values,
            repeats,
        } => {
            let file = load_with_overrides(&common)?;
            let cfg = file.train.resolve(&train.as_section(), common.seed)?;
            let section = file.sweep.as_ref();
            let param: SweepParam = match (&param, section) {
                (Some(p), _) => p.parse()?,
                (None, Some(s)) => s.param()?,
                (None, None) => SweepParam::Lambda,
            };
            let values = values
                .or_else(|| section.map(|s| s.values.clone()))
                .ok_or_else(|| Error::Config("sweep needs --values or a [sweep] section".into()))?;
            let repeats = repeats
                .or_else(|| section.map(|s| s.repeats))
                .unwrap_or(3);
            let (train_set, dev_set, test_set) = file.data.build(common.seed)?;
            let runs = sweep(&cfg, param, &values, repeats, &train_set, &dev_set, &test_set)?;

            std::fs::create_dir_all(&out_dir)?;
            emit_report(&runs, &out_dir.join("runs.csv"), ReportFormat::Csv)?;
            emit_report(&runs, &out_dir.join("runs.json"), ReportFormat::Json)?;
            emit_report(&runs, &out_dir.join("scatter.svg"), ReportFormat::SvgScatter)?;

            let aggs = aggregate(&runs, param);
            for a in &aggs {
                println!(
                    "value {:>8}: dev F1 {:.2}+-{:.2} GAP {:.2}+-{:.2} | test F1 {:.2}+-{:.2} GAP {:.2}+-{:.2}",
                    a.value,
                    pct(a.dev_f1_micro.mean),
                    pct(a.dev_f1_micro.std),
                    pct(a.dev_gap.mean),
                    pct(a.dev_gap.std),
                    pct(a.test_f1_micro.mean),
                    pct(a.test_f1_micro.std),
                    pct(a.test_gap.mean),
                    pct(a.test_gap.std),
                );
            }
            let picked = select_aggregate(&aggs, cfg.selection_eps);
            println!(
                "selected value {} (dev F1 {:.2}, dev GAP {:.2})",
                picked.value,
                pct(picked.dev_f1_micro.mean),
                pct(picked.dev_gap.mean)
            );
            println!("reports: {}", out_dir.display());
        }
        Cmd::Sizesweep {
            common,
            train,
            out_dir,
            fractions,
        } => {
            let file = load_with_overrides(&common)?;
            let cfg = file.train.resolve(&train.as_section(), common.seed)?;
            let fractions = fractions
                .or_else(|| file.sizesweep.as_ref().map(|s| s.fractions.clone()))
                .ok_or_else(|| {
                    Error::Config("sizesweep needs --fractions or a [sizesweep] section".into())
                })?;
            let (train_set, dev_set, test_set) = file.data.build(common.seed)?;
            let rows = size_sweep(&cfg, &fractions, &train_set, &dev_set, &test_set)?;
            std::fs::create_dir_all(&out_dir)?;
            let csv = std::fs::File::create(out_dir.join("sizes.csv"))?;
            write_size_csv(&rows, csv)?;
            let json = std::fs::File::create(out_dir.join("sizes.json"))?;
            write_size_json(&rows, json)?;
            for row in &rows {
                println!(
                    "train size {:>7}: test F1 {:.2} GAP {:.2}",
                    row.train_size,
                    pct(row.result.test.f1_micro),
                    pct(row.result.test.gap)
                );
            }
            println!("reports: {}", out_dir.display());
        }
        Cmd::Report { runs, format, out } => {
            let file = std::fs::File::open(&runs)?;
            let results = read_json(std::io::BufReader::new(file))?;
            let format: ReportFormat = format.parse()?;
            emit_report(&results, &out, format)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn exit_code(err: &Error) -> i32 {
    match err.category() {
        "validation" => 2,
        "parse" => 3,
        "io" => 4,
        "empty-group" => 5,
        "config" => 6,
        "non-finite" => 7,
        "checkpoint" => 8,
        _ => 1,
    }
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error[{}]: {err}", err.category());
        std::process::exit(exit_code(&err));
    }
}
