//! Evaluation: per-group true-positive rates, the RMS TPR-gap fairness
//! metric, micro/macro F1 and accuracy.
//!
//! All metrics are reported in [0, 1]; display layers multiply by 100.

use crate::error::{Error, Result};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Exact prediction counts: a full gold-by-predicted confusion matrix plus,
/// for every (label, attribute) group, its size and its count of correct
/// predictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionByGroup {
    /// `matrix[[gold, pred]]` over all examples.
    pub matrix: Array2<usize>,
    /// `group_total[y][a]` = m_{y,a}.
    pub group_total: Vec<[usize; 2]>,
    /// `group_correct[y][a]` = correct predictions within the group.
    pub group_correct: Vec<[usize; 2]>,
    pub n: usize,
}

impl ConfusionByGroup {
    /// True-positive rate of group (y, a); `None` when the group is empty.
    pub fn tpr(&self, y: usize, a: usize) -> Option<f64> {
        let m = self.group_total[y][a];
        (m > 0).then(|| self.group_correct[y][a] as f64 / m as f64)
    }

    pub fn num_classes(&self) -> usize {
        self.group_total.len()
    }
}

/// Tallies predictions against gold labels and attributes.
pub fn confusion(
    preds: &[usize],
    labels: &[usize],
    attributes: &[u8],
    num_classes: usize,
) -> Result<ConfusionByGroup> {
    let n = preds.len();
    if labels.len() != n || attributes.len() != n {
        return Err(Error::Validation(format!(
            "length mismatch: {} predictions, {} labels, {} attributes",
            n,
            labels.len(),
            attributes.len()
        )));
    }
    let mut matrix = Array2::zeros((num_classes, num_classes));
    let mut group_total = vec![[0usize; 2]; num_classes];
    let mut group_correct = vec![[0usize; 2]; num_classes];
    for i in 0..n {
        let (p, y, a) = (preds[i], labels[i], attributes[i] as usize);
        if p >= num_classes || y >= num_classes {
            return Err(Error::Validation(format!(
                "class index out of range at row {i}"
            )));
        }
        matrix[[y, p]] += 1;
        group_total[y][a] += 1;
        if p == y {
            group_correct[y][a] += 1;
        }
    }
    Ok(ConfusionByGroup {
        matrix,
        group_total,
        group_correct,
        n,
    })
}

/// Fairness and task metrics for one evaluation.
///
/// `per_class_gap[y]` is |TPR_{y,0} - TPR_{y,1}|, `null` for classes where
/// either group is empty; such classes are listed in `excluded_classes` and
/// left out of the RMS `gap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub per_class_gap: Vec<Option<f64>>,
    pub gap: f64,
    pub f1_micro: f64,
    pub f1_macro: f64,
    pub accuracy: f64,
    pub excluded_classes: Vec<usize>,
}

/// Root-mean-square of the per-class TPR gaps, over classes where both
/// attribute groups are present. Errors when no class qualifies.
pub fn gap_rms(conf: &ConfusionByGroup) -> Result<(Vec<Option<f64>>, f64, Vec<usize>)> {
    let mut per_class = Vec::with_capacity(conf.num_classes());
    let mut excluded = Vec::new();
    let mut sum_sq = 0.0;
    let mut included = 0usize;
    for y in 0..conf.num_classes() {
        match (conf.tpr(y, 0), conf.tpr(y, 1)) {
            (Some(t0), Some(t1)) => {
                let g = (t0 - t1).abs();
                per_class.push(Some(g));
                sum_sq += g * g;
                included += 1;
            }
            _ => {
                per_class.push(None);
                excluded.push(y);
            }
        }
    }
    if included == 0 {
        return Err(Error::Validation(
            "no class has both attribute groups present".into(),
        ));
    }
    Ok((per_class, (sum_sq / included as f64).sqrt(), excluded))
}

/// Micro and macro F1 from the confusion matrix. Per-class F1 is 0 when
/// precision + recall is 0; the macro mean runs over classes present in
/// gold; micro is computed from pooled counts (equal to accuracy for
/// single-label classification).
pub fn f1_scores(conf: &ConfusionByGroup) -> (f64, f64) {
    let c = conf.num_classes();
    let mut macro_sum = 0.0;
    let mut macro_n = 0usize;
    let mut correct = 0usize;
    for y in 0..c {
        let tp = conf.matrix[[y, y]];
        correct += tp;
        let gold: usize = (0..c).map(|p| conf.matrix[[y, p]]).sum();
        let predicted: usize = (0..c).map(|g| conf.matrix[[g, y]]).sum();
        if gold == 0 {
            continue;
        }
        let precision = if predicted == 0 {
            0.0
        } else {
            tp as f64 / predicted as f64
        };
        let recall = tp as f64 / gold as f64;
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        macro_sum += f1;
        macro_n += 1;
    }
    let micro = if conf.n == 0 {
        0.0
    } else {
        correct as f64 / conf.n as f64
    };
    let macro_f1 = if macro_n == 0 { 0.0 } else { macro_sum / macro_n as f64 };
    (micro, macro_f1)
}

/// Bundles the gap and F1 metrics into one report.
pub fn report(conf: &ConfusionByGroup) -> Result<FairnessReport> {
    let (per_class_gap, gap, excluded_classes) = gap_rms(conf)?;
    let (f1_micro, f1_macro) = f1_scores(conf);
    Ok(FairnessReport {
        per_class_gap,
        gap,
        f1_micro,
        f1_macro,
        accuracy: f1_micro,
        excluded_classes,
    })
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = ranks(xs);
    let ry = ranks(ys);
    pearson(&rx, &ry)
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}
