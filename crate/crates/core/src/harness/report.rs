//! Run-report emission: flat CSV, full JSON, and an SVG scatter of the
//! performance-fairness plane. Output is byte-deterministic for identical
//! inputs; metric columns are scaled by 100 for display.

use super::{pareto_front, ParetoPoint, RunResult};
use crate::error::{Error, Result};
use std::io::{BufWriter, Read, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    SvgScatter,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "svg" | "svg-scatter" => Ok(ReportFormat::SvgScatter),
            other => Err(Error::Config(format!("unknown report format `{other}`"))),
        }
    }
}

/// Writes `results` to `path` in the requested format.
pub fn emit_report(results: &[RunResult], path: &Path, format: ReportFormat) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    match format {
        ReportFormat::Csv => write_csv(results, &mut w)?,
        ReportFormat::Json => write_json(results, &mut w)?,
        ReportFormat::SvgScatter => write_svg(results, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

/// Display label for a run's mitigation strategy: the method name, or the
/// objective name for plain runs.
pub fn series_label(result: &RunResult) -> String {
    match result.config.method {
        super::Method::Plain => result.config.objective.as_str().to_string(),
        m => m.as_str().to_string(),
    }
}

fn sorted_rows(results: &[RunResult]) -> Vec<&RunResult> {
    let mut rows: Vec<&RunResult> = results.iter().collect();
    rows.sort_by(|a, b| {
        a.config
            .method
            .as_str()
            .cmp(b.config.method.as_str())
            .then(a.config.objective.as_str().cmp(b.config.objective.as_str()))
            .then(
                a.config
                    .lambda
                    .unwrap_or(0.0)
                    .partial_cmp(&b.config.lambda.unwrap_or(0.0))
                    .unwrap(),
            )
            .then(
                a.config
                    .alpha
                    .unwrap_or(0.0)
                    .partial_cmp(&b.config.alpha.unwrap_or(0.0))
                    .unwrap(),
            )
            .then(a.config.seed.cmp(&b.config.seed))
    });
    rows
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per run, sorted by (method, objective, lambda, alpha, seed).
/// Metric columns are x100.
pub fn write_csv<W: Write>(results: &[RunResult], mut w: W) -> Result<()> {
    writeln!(
        w,
        "method,objective,lambda,alpha,seed,lr,batch_size,hidden,max_epochs,patience,\
         selected_epoch,epochs_run,dev_f1_micro,dev_f1_macro,dev_gap,test_f1_micro,\
         test_f1_macro,test_gap,test_accuracy"
    )?;
    for r in sorted_rows(results) {
        let c = &r.config;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}",
            c.method.as_str(),
            c.objective.as_str(),
            opt(c.lambda),
            opt(c.alpha),
            c.seed,
            c.lr,
            c.batch_size,
            c.hidden,
            c.max_epochs,
            c.patience,
            r.selected_epoch,
            r.epochs_run,
            100.0 * r.dev.f1_micro,
            100.0 * r.dev.f1_macro,
            100.0 * r.dev.gap,
            100.0 * r.test.f1_micro,
            100.0 * r.test.f1_macro,
            100.0 * r.test.gap,
            100.0 * r.test.accuracy,
        )?;
    }
    Ok(())
}

pub fn write_json<W: Write>(results: &[RunResult], w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, results)
        .map_err(|e| Error::Validation(format!("serializing runs: {e}")))
}

pub fn write_size_json<W: Write>(rows: &[super::SizeSweepRow], w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, rows)
        .map_err(|e| Error::Validation(format!("serializing size sweep: {e}")))
}

/// Training-size study rows, keyed by the absolute train-set size.
pub fn write_size_csv<W: Write>(rows: &[super::SizeSweepRow], mut w: W) -> Result<()> {
    writeln!(
        w,
        "train_size,fraction,method,objective,lambda,alpha,seed,test_f1_micro,test_f1_macro,test_gap"
    )?;
    for row in rows {
        let c = &row.result.config;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{:.4},{:.4},{:.4}",
            row.train_size,
            row.fraction,
            c.method.as_str(),
            c.objective.as_str(),
            opt(c.lambda),
            opt(c.alpha),
            c.seed,
            100.0 * row.result.test.f1_micro,
            100.0 * row.result.test.f1_macro,
            100.0 * row.result.test.gap,
        )?;
    }
    Ok(())
}

pub fn read_json<R: Read>(r: R) -> Result<Vec<RunResult>> {
    serde_json::from_reader(r).map_err(|e| Error::Parse {
        line: e.line(),
        msg: format!("runs json: {e}"),
    })
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

struct Frame {
    x0: f64,
    y0: f64,
    width: f64,
    height: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        self.x0 + (v - self.xmin) / (self.xmax - self.xmin) * self.width
    }

    fn y(&self, v: f64) -> f64 {
        // SVG y grows downward.
        self.y0 + self.height - (v - self.ymin) / (self.ymax - self.ymin) * self.height
    }
}

/// Test micro-F1 (x) against test GAP (y), both x100, one color per series,
/// with each series' Pareto points ringed.
pub fn write_svg<W: Write>(results: &[RunResult], mut w: W) -> Result<()> {
    let (width, height) = (720.0, 500.0);
    let mut series: Vec<String> = results.iter().map(series_label).collect();
    series.sort();
    series.dedup();

    let xs: Vec<f64> = results.iter().map(|r| 100.0 * r.test.f1_micro).collect();
    let ys: Vec<f64> = results.iter().map(|r| 100.0 * r.test.gap).collect();
    let (xmin, xmax) = padded_range(&xs, 0.0, 100.0);
    let (ymin, ymax) = padded_range(&ys, 0.0, 100.0);
    let frame = Frame {
        x0: 70.0,
        y0: 20.0,
        width: width - 70.0 - 150.0,
        height: height - 20.0 - 60.0,
        xmin,
        xmax,
        ymin,
        ymax,
    };

    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )?;
    writeln!(
        w,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    )?;

    // Axes with 6 ticks each.
    let axis_y = frame.y0 + frame.height;
    writeln!(
        w,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        frame.x0,
        axis_y,
        frame.x0 + frame.width,
        axis_y
    )?;
    writeln!(
        w,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        frame.x0, frame.y0, frame.x0, axis_y
    )?;
    for k in 0..=5 {
        let t = k as f64 / 5.0;
        let xv = xmin + t * (xmax - xmin);
        let yv = ymin + t * (ymax - ymin);
        let xp = frame.x(xv);
        let yp = frame.y(yv);
        writeln!(
            w,
            r#"<line x1="{xp:.2}" y1="{axis_y:.2}" x2="{xp:.2}" y2="{:.2}" stroke="black"/>"#,
            axis_y + 5.0
        )?;
        writeln!(
            w,
            r#"<text x="{xp:.2}" y="{:.2}" font-size="11" text-anchor="middle">{xv:.1}</text>"#,
            axis_y + 18.0
        )?;
        writeln!(
            w,
            r#"<line x1="{:.2}" y1="{yp:.2}" x2="{:.2}" y2="{yp:.2}" stroke="black"/>"#,
            frame.x0 - 5.0,
            frame.x0
        )?;
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{yv:.1}</text>"#,
            frame.x0 - 8.0,
            yp + 4.0
        )?;
    }
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">micro-F1 (x100)</text>"#,
        frame.x0 + frame.width / 2.0,
        axis_y + 40.0
    )?;
    writeln!(
        w,
        r#"<text x="18" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.2})">GAP (x100)</text>"#,
        frame.y0 + frame.height / 2.0,
        frame.y0 + frame.height / 2.0
    )?;

    for (si, name) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let members: Vec<&RunResult> = results
            .iter()
            .filter(|r| &series_label(r) == name)
            .collect();
        let points: Vec<ParetoPoint> = members
            .iter()
            .enumerate()
            .map(|(i, r)| ParetoPoint {
                performance: 100.0 * r.test.f1_micro,
                gap: 100.0 * r.test.gap,
                key: i.to_string(),
            })
            .collect();
        let front = pareto_front(&points);
        for p in &points {
            writeln!(
                w,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}" fill-opacity="0.8"/>"#,
                frame.x(p.performance),
                frame.y(p.gap)
            )?;
        }
        for p in &front {
            writeln!(
                w,
                r#"<circle cx="{:.2}" cy="{:.2}" r="7" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                frame.x(p.performance),
                frame.y(p.gap)
            )?;
        }
        let ly = 30.0 + 20.0 * si as f64;
        writeln!(
            w,
            r#"<rect x="{:.2}" y="{ly:.2}" width="12" height="12" fill="{color}"/>"#,
            width - 140.0
        )?;
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" font-size="12">{name}</text>"#,
            width - 122.0,
            ly + 10.0
        )?;
    }
    writeln!(w, "</svg>")?;
    Ok(())
}

fn padded_range(values: &[f64], lo_default: f64, hi_default: f64) -> (f64, f64) {
    if values.is_empty() {
        return (lo_default, hi_default);
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (max - min).max(1.0);
    (min - 0.08 * span, max + 0.08 * span)
}
