//! Group-decomposed losses and the equal-opportunity training objectives.
//!
//! Batch losses are decomposed into per-(label, attribute) means. An
//! objective adds a fairness penalty on top of the overall cross-entropy and,
//! equivalently, turns into per-example weights whose weighted-CE gradient
//! drives training: each group's weight is `m/N` plus the penalty's
//! derivative with respect to that group's mean loss, holding the per-class
//! and overall reference means fixed for the batch.

use crate::dataset::GroupCounts;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

/// Training objective family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// Plain cross-entropy, no fairness penalty.
    #[default]
    Ce,
    /// Penalize each group's deviation from its class-mean loss.
    EoCla,
    /// Penalize each group's deviation from the overall batch loss.
    EoGlb,
    /// Only up-weight the worse-performing group of each class.
    EoClaMax,
    /// Only down-weight the better-performing group of each class.
    EoClaMin,
    /// Max ablation with deviations measured from the overall loss.
    EoGlbMax,
    /// Min ablation with deviations measured from the overall loss.
    EoGlbMin,
}

impl ObjectiveKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ObjectiveKind::Ce => "ce",
            ObjectiveKind::EoCla => "eo_cla",
            ObjectiveKind::EoGlb => "eo_glb",
            ObjectiveKind::EoClaMax => "eo_cla_max",
            ObjectiveKind::EoClaMin => "eo_cla_min",
            ObjectiveKind::EoGlbMax => "eo_glb_max",
            ObjectiveKind::EoGlbMin => "eo_glb_min",
        }
    }

    pub const ALL: [ObjectiveKind; 7] = [
        ObjectiveKind::Ce,
        ObjectiveKind::EoCla,
        ObjectiveKind::EoGlb,
        ObjectiveKind::EoClaMax,
        ObjectiveKind::EoClaMin,
        ObjectiveKind::EoGlbMax,
        ObjectiveKind::EoGlbMin,
    ];
}

impl std::str::FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ObjectiveKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown objective `{s}`")))
    }
}

/// Objective kind plus its penalty weight. `lambda = 0` reduces every kind
/// to plain cross-entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveSpec<S: Scalar = f64> {
    pub kind: ObjectiveKind,
    pub lambda: S,
}

impl<S: Scalar> ObjectiveSpec<S> {
    pub fn new(kind: ObjectiveKind, lambda: S) -> Result<Self> {
        if lambda < S::zero() || !lambda.is_finite() {
            return Err(Error::Validation(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(ObjectiveSpec { kind, lambda })
    }

    pub fn ce() -> Self {
        ObjectiveSpec {
            kind: ObjectiveKind::Ce,
            lambda: S::zero(),
        }
    }
}

/// Per-(label, attribute) mean losses for one batch. Empty groups are
/// represented as `None`, never as a silent zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupLossTable<S: Scalar = f64> {
    group_mean: Vec<[Option<S>; 2]>,
    class_mean: Vec<Option<S>>,
    /// Mean loss over the whole batch.
    pub overall: S,
    pub counts: GroupCounts,
}

impl<S: Scalar> GroupLossTable<S> {
    /// Builds a table from explicit group means and counts, deriving the
    /// class means and the overall mean. When the two group means of a class
    /// are bitwise equal their class mean is that exact value, which keeps
    /// sign computations at constructed ties exact.
    pub fn from_parts(counts: GroupCounts, group_mean: Vec<[Option<S>; 2]>) -> Result<Self> {
        let c = counts.num_classes();
        if group_mean.len() != c {
            return Err(Error::Validation(format!(
                "{} group-mean rows for {} classes",
                group_mean.len(),
                c
            )));
        }
        let cell_sum: usize = counts.counts.iter().map(|row| row[0] + row[1]).sum();
        if cell_sum != counts.total {
            return Err(Error::Validation(format!(
                "group counts sum to {cell_sum} but total is {}",
                counts.total
            )));
        }
        for (y, row) in group_mean.iter().enumerate() {
            for (a, cell) in row.iter().enumerate() {
                if cell.is_some() != (counts.get(y, a) > 0) {
                    return Err(Error::Validation(format!(
                        "group ({y},{a}) presence does not match its count"
                    )));
                }
            }
        }
        let class_mean = (0..c)
            .map(|y| Self::combine(group_mean[y], counts.counts[y]))
            .collect();
        let mut total = S::zero();
        let mut uniform: Option<S> = None;
        let mut all_equal = true;
        for (y, row) in group_mean.iter().enumerate() {
            for (a, cell) in row.iter().enumerate() {
                if let Some(v) = cell {
                    total = total + *v * S::from(counts.get(y, a)).unwrap();
                    match uniform {
                        None => uniform = Some(*v),
                        Some(u) => all_equal &= u == *v,
                    }
                }
            }
        }
        if counts.total == 0 {
            return Err(Error::Validation("empty table".into()));
        }
        let overall = if all_equal {
            uniform.unwrap()
        } else {
            total / S::from(counts.total).unwrap()
        };
        Ok(GroupLossTable {
            group_mean,
            class_mean,
            overall,
            counts,
        })
    }

    fn combine(means: [Option<S>; 2], counts: [usize; 2]) -> Option<S> {
        match (means[0], means[1]) {
            (None, None) => None,
            (Some(v), None) | (None, Some(v)) => Some(v),
            (Some(l0), Some(l1)) => {
                if l0 == l1 {
                    Some(l0)
                } else {
                    let m0 = S::from(counts[0]).unwrap();
                    let m1 = S::from(counts[1]).unwrap();
                    Some((m0 * l0 + m1 * l1) / (m0 + m1))
                }
            }
        }
    }

    /// Mean loss of group (y, a), or `None` when the group is empty.
    pub fn group(&self, y: usize, a: usize) -> Option<S> {
        self.group_mean[y][a]
    }

    /// Mean loss of class y over both attribute groups.
    pub fn class(&self, y: usize) -> Option<S> {
        self.class_mean[y]
    }

    pub fn num_classes(&self) -> usize {
        self.group_mean.len()
    }
}

/// Decomposes per-example losses into the group table.
pub fn group_losses<S: Scalar>(
    per_example_ce: &Array1<S>,
    labels: &[usize],
    attributes: &[u8],
    num_classes: usize,
) -> Result<GroupLossTable<S>> {
    let n = per_example_ce.len();
    if labels.len() != n || attributes.len() != n {
        return Err(Error::Validation(format!(
            "length mismatch: {} losses, {} labels, {} attributes",
            n,
            labels.len(),
            attributes.len()
        )));
    }
    if n == 0 {
        return Err(Error::Validation("empty batch".into()));
    }
    let mut sums = vec![[S::zero(); 2]; num_classes];
    let mut counts = vec![[0usize; 2]; num_classes];
    for i in 0..n {
        let (y, a) = (labels[i], attributes[i] as usize);
        if y >= num_classes {
            return Err(Error::Validation(format!(
                "label {y} out of range [0, {num_classes})"
            )));
        }
        sums[y][a] = sums[y][a] + per_example_ce[i];
        counts[y][a] += 1;
    }
    let group_mean = (0..num_classes)
        .map(|y| {
            [0, 1].map(|a| {
                (counts[y][a] > 0).then(|| sums[y][a] / S::from(counts[y][a]).unwrap())
            })
        })
        .collect();
    GroupLossTable::from_parts(
        GroupCounts {
            counts,
            total: n,
        },
        group_mean,
    )
}

fn sign<S: Scalar>(diff: S) -> S {
    if diff > S::zero() {
        S::one()
    } else if diff < S::zero() {
        -S::one()
    } else {
        S::zero()
    }
}

/// Index of the occupied group with the larger (or smaller, for `max=false`)
/// loss in class y; ties resolve to attribute 0.
fn arg_extreme<S: Scalar>(table: &GroupLossTable<S>, y: usize, max: bool) -> Option<usize> {
    match (table.group(y, 0), table.group(y, 1)) {
        (None, None) => None,
        (Some(_), None) => Some(0),
        (None, Some(_)) => Some(1),
        (Some(l0), Some(l1)) => {
            if (max && l1 > l0) || (!max && l1 < l0) {
                Some(1)
            } else {
                Some(0)
            }
        }
    }
}

/// Scalar value of the objective on a batch's group-loss table. Sums skip
/// empty groups.
pub fn objective_value<S: Scalar>(table: &GroupLossTable<S>, spec: &ObjectiveSpec<S>) -> S {
    let lambda = spec.lambda;
    let mut penalty = S::zero();
    match spec.kind {
        ObjectiveKind::Ce => return table.overall,
        ObjectiveKind::EoCla => {
            for y in 0..table.num_classes() {
                if let Some(class) = table.class(y) {
                    for a in 0..2 {
                        if let Some(l) = table.group(y, a) {
                            penalty = penalty + (l - class).abs();
                        }
                    }
                }
            }
        }
        ObjectiveKind::EoGlb => {
            for y in 0..table.num_classes() {
                for a in 0..2 {
                    if let Some(l) = table.group(y, a) {
                        penalty = penalty + (l - table.overall).abs();
                    }
                }
            }
        }
        ObjectiveKind::EoClaMax => {
            for y in 0..table.num_classes() {
                if let Some(a) = arg_extreme(table, y, true) {
                    penalty = penalty + table.group(y, a).unwrap();
                }
            }
        }
        ObjectiveKind::EoClaMin => {
            for y in 0..table.num_classes() {
                if let Some(a) = arg_extreme(table, y, false) {
                    penalty = penalty - table.group(y, a).unwrap();
                }
            }
        }
        ObjectiveKind::EoGlbMax => {
            for y in 0..table.num_classes() {
                if let Some(a) = arg_extreme(table, y, true) {
                    penalty = penalty + (table.group(y, a).unwrap() - table.overall);
                }
            }
        }
        ObjectiveKind::EoGlbMin => {
            for y in 0..table.num_classes() {
                if let Some(a) = arg_extreme(table, y, false) {
                    penalty = penalty - (table.group(y, a).unwrap() - table.overall);
                }
            }
        }
    }
    table.overall + lambda * penalty
}

/// Group weights plus their per-example expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveWeights<S: Scalar = f64> {
    /// `group_weight[y][a]`; `None` for empty groups.
    pub group_weight: Vec<[Option<S>; 2]>,
    /// `per_example[i] = group_weight[y_i][a_i] / m_{y_i, a_i}`.
    pub per_example: Array1<S>,
}

/// Group weights for the objective: `m/N` for plain cross-entropy, adjusted
/// by +/- lambda according to each group's standing within its class (or
/// against the overall mean). The signs and argmax/argmin choices are frozen
/// per batch, so the weighted CE is piecewise linear in the group means.
pub fn group_weights<S: Scalar>(
    table: &GroupLossTable<S>,
    spec: &ObjectiveSpec<S>,
) -> Vec<[Option<S>; 2]> {
    let n = S::from(table.counts.total).unwrap();
    let lambda = spec.lambda;
    (0..table.num_classes())
        .map(|y| {
            let extreme = match spec.kind {
                ObjectiveKind::EoClaMax | ObjectiveKind::EoGlbMax => arg_extreme(table, y, true),
                ObjectiveKind::EoClaMin | ObjectiveKind::EoGlbMin => arg_extreme(table, y, false),
                _ => None,
            };
            [0, 1].map(|a| {
                let loss = table.group(y, a)?;
                let base = S::from(table.counts.get(y, a)).unwrap() / n;
                let adjust = match spec.kind {
                    ObjectiveKind::Ce => S::zero(),
                    ObjectiveKind::EoCla => {
                        lambda * sign(loss - table.class(y).expect("occupied class"))
                    }
                    ObjectiveKind::EoGlb => lambda * sign(loss - table.overall),
                    ObjectiveKind::EoClaMax | ObjectiveKind::EoGlbMax => {
                        if extreme == Some(a) {
                            lambda
                        } else {
                            S::zero()
                        }
                    }
                    ObjectiveKind::EoClaMin | ObjectiveKind::EoGlbMin => {
                        if extreme == Some(a) {
                            -lambda
                        } else {
                            S::zero()
                        }
                    }
                };
                Some(base + adjust)
            })
        })
        .collect()
}

/// Expands the group weights over a batch. The examples must be the ones the
/// table was computed from (same counts).
pub fn effective_weights<S: Scalar>(
    table: &GroupLossTable<S>,
    spec: &ObjectiveSpec<S>,
    labels: &[usize],
    attributes: &[u8],
) -> Result<EffectiveWeights<S>> {
    if labels.len() != attributes.len() {
        return Err(Error::Validation(format!(
            "{} labels but {} attributes",
            labels.len(),
            attributes.len()
        )));
    }
    let group_weight = group_weights(table, spec);
    let per_example = labels
        .iter()
        .zip(attributes)
        .map(|(&y, &a)| {
            let a = a as usize;
            let gw = group_weight[y][a].ok_or_else(|| Error::EmptyGroup {
                label: y,
                attribute: a,
                context: "example belongs to a group absent from the loss table".into(),
            })?;
            Ok(gw / S::from(table.counts.get(y, a)).unwrap())
        })
        .collect::<Result<Vec<S>>>()?;
    Ok(EffectiveWeights {
        group_weight,
        per_example: Array1::from_vec(per_example),
    })
}

/// Mean negative log-probability of the true class over group (y, a); for a
/// binary task and y = 1 this estimates -log TPR of the group.
pub fn bce_positive_group<S: Scalar>(
    probabilities: &Array2<S>,
    labels: &[usize],
    attributes: &[u8],
    y: usize,
    a: u8,
) -> Result<S> {
    if probabilities.ncols() != 2 {
        return Err(Error::Config(format!(
            "binary task required, got {} classes",
            probabilities.ncols()
        )));
    }
    let mut total = S::zero();
    let mut count = 0usize;
    for i in 0..labels.len() {
        if labels[i] == y && attributes[i] == a {
            total = total - probabilities[[i, y]].ln();
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptyGroup {
            label: y,
            attribute: a as usize,
            context: "group estimator needs at least one example".into(),
        });
    }
    Ok(total / S::from(count).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn table(losses: &[f64], labels: &[usize], attrs: &[u8], c: usize) -> GroupLossTable {
        group_losses(&Array1::from_vec(losses.to_vec()), labels, attrs, c).unwrap()
    }

    #[test]
    fn group_losses_direct_means() {
        let t = table(&[1.0, 3.0], &[1, 1], &[0, 1], 2);
        assert_eq!(t.group(1, 0), Some(1.0));
        assert_eq!(t.group(1, 1), Some(3.0));
        assert_eq!(t.class(1), Some(2.0));
        assert_eq!(t.group(0, 0), None);
        assert_eq!(t.class(0), None);
    }

    #[test]
    fn group_losses_constant_batch() {
        let t = table(&[0.7; 6], &[0, 0, 0, 1, 1, 1], &[0, 1, 0, 1, 0, 1], 2);
        for y in 0..2 {
            for a in 0..2 {
                assert_eq!(t.group(y, a), Some(0.7));
            }
            assert_eq!(t.class(y), Some(0.7));
        }
        assert_eq!(t.overall, 0.7);
    }

    #[test]
    fn group_losses_weighted_class_mean() {
        let t = table(&[1.0, 1.0, 1.0, 5.0], &[1, 1, 1, 1], &[0, 0, 0, 1], 2);
        assert_abs_diff_eq!(t.class(1).unwrap(), 2.0, epsilon = 1e-12);
    }

    fn example_table() -> GroupLossTable {
        // L(1,0)=1, L(1,1)=3, L(0,0)=L(0,1)=2, all m=2, N=8.
        table(
            &[1.0, 1.0, 3.0, 3.0, 2.0, 2.0, 2.0, 2.0],
            &[1, 1, 1, 1, 0, 0, 0, 0],
            &[0, 0, 1, 1, 0, 0, 1, 1],
            2,
        )
    }

    #[test]
    fn eo_cla_hand_value() {
        let t = example_table();
        assert_abs_diff_eq!(t.overall, 2.0, epsilon = 1e-12);
        let spec = ObjectiveSpec::new(ObjectiveKind::EoCla, 0.5).unwrap();
        assert_abs_diff_eq!(objective_value(&t, &spec), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn lambda_zero_reduces_to_ce() {
        let t = example_table();
        for kind in ObjectiveKind::ALL {
            let spec = ObjectiveSpec::new(kind, 0.0).unwrap();
            assert_eq!(objective_value(&t, &spec), t.overall);
        }
    }

    #[test]
    fn equalized_groups_have_zero_penalty() {
        let t = table(&[0.9; 4], &[0, 0, 1, 1], &[0, 1, 0, 1], 2);
        for kind in [ObjectiveKind::EoCla, ObjectiveKind::EoGlb] {
            let spec = ObjectiveSpec::new(kind, 2.5).unwrap();
            assert_eq!(objective_value(&t, &spec), t.overall);
        }
    }

    #[test]
    fn weight_arithmetic() {
        // m=25, N=100, disadvantaged group: 0.25 + 0.5 = 0.75.
        let counts = GroupCounts {
            counts: vec![[25, 25], [25, 25]],
            total: 100,
        };
        let t = GroupLossTable::from_parts(
            counts,
            vec![
                [Some(1.0), Some(1.0)],
                [Some(2.0), Some(1.0)], // group (1,0) is worse than its class mean
            ],
        )
        .unwrap();
        let spec = ObjectiveSpec::new(ObjectiveKind::EoCla, 0.5).unwrap();
        let gw = group_weights(&t, &spec);
        assert_abs_diff_eq!(gw[1][0].unwrap(), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(gw[1][1].unwrap(), -0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(gw[0][0].unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn ce_weights_are_counts_over_n() {
        let t = example_table();
        let spec = ObjectiveSpec::<f64>::ce();
        let ew = effective_weights(&t, &spec, &[1, 1, 1, 1, 0, 0, 0, 0], &[0, 0, 1, 1, 0, 0, 1, 1])
            .unwrap();
        for gw in &ew.group_weight {
            for w in gw.iter().flatten() {
                assert_eq!(*w, 0.25);
            }
        }
        for &w in ew.per_example.iter() {
            assert_abs_diff_eq!(w, 1.0 / 8.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn weighted_sum_equals_objective_for_eo_cla() {
        let t = example_table();
        let spec = ObjectiveSpec::new(ObjectiveKind::EoCla, 0.5).unwrap();
        let gw = group_weights(&t, &spec);
        let mut weighted = 0.0;
        for y in 0..2 {
            for a in 0..2 {
                weighted += gw[y][a].unwrap() * t.group(y, a).unwrap();
            }
        }
        // (0.25-0.5)*1 + (0.25+0.5)*3 + 0.25*2 + 0.25*2 = 3.0
        assert_abs_diff_eq!(weighted, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(weighted, objective_value(&t, &spec), epsilon = 1e-12);
    }

    #[test]
    fn cla_max_and_min_values() {
        let t = example_table();
        let max = ObjectiveSpec::new(ObjectiveKind::EoClaMax, 0.5).unwrap();
        // overall + 0.5*(max(1,3) + max(2,2)) = 2 + 0.5*5 = 4.5
        assert_abs_diff_eq!(objective_value(&t, &max), 4.5, epsilon = 1e-12);
        let min = ObjectiveSpec::new(ObjectiveKind::EoClaMin, 0.5).unwrap();
        // overall - 0.5*(min(1,3) + min(2,2)) = 2 - 1.5 = 0.5
        assert_abs_diff_eq!(objective_value(&t, &min), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn glb_variants_use_overall_reference() {
        let t = example_table();
        let glb = ObjectiveSpec::new(ObjectiveKind::EoGlb, 0.5).unwrap();
        // overall + 0.5*(|1-2|+|3-2|+0+0) = 3.0
        assert_abs_diff_eq!(objective_value(&t, &glb), 3.0, epsilon = 1e-12);
        let gmax = ObjectiveSpec::new(ObjectiveKind::EoGlbMax, 0.5).unwrap();
        // overall + 0.5*((3-2) + (2-2)) = 2.5
        assert_abs_diff_eq!(objective_value(&t, &gmax), 2.5, epsilon = 1e-12);
        let gmin = ObjectiveSpec::new(ObjectiveKind::EoGlbMin, 0.5).unwrap();
        // overall - 0.5*((1-2) + (2-2)) = 2.5
        assert_abs_diff_eq!(objective_value(&t, &gmin), 2.5, epsilon = 1e-12);
    }

    #[test]
    fn exact_tie_gives_sign_zero() {
        let counts = GroupCounts {
            counts: vec![[3, 5]],
            total: 8,
        };
        let t = GroupLossTable::from_parts(counts, vec![[Some(0.3), Some(0.3)]]).unwrap();
        assert_eq!(t.class(0), Some(0.3));
        let spec = ObjectiveSpec::new(ObjectiveKind::EoCla, 0.7).unwrap();
        let gw = group_weights(&t, &spec);
        assert_abs_diff_eq!(gw[0][0].unwrap(), 3.0 / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(gw[0][1].unwrap(), 5.0 / 8.0, epsilon = 1e-15);
        assert_eq!(objective_value(&t, &spec), t.overall);
    }

    #[test]
    fn missing_group_weight_errors_for_foreign_example() {
        let t = table(&[1.0, 2.0], &[1, 1], &[0, 1], 2);
        let spec = ObjectiveSpec::<f64>::ce();
        // Example with label 0 was not in the table.
        let err = effective_weights(&t, &spec, &[0], &[0]);
        assert!(matches!(err, Err(Error::EmptyGroup { label: 0, .. })));
    }

    #[test]
    fn bce_group_perfect_confidence() {
        let probs = array![[0.0, 1.0], [0.0, 1.0]];
        let v = bce_positive_group(&probs, &[1, 1], &[0, 0], 1, 0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn bce_group_direct_evaluation() {
        let probs = array![[0.5, 0.5], [0.75, 0.25]];
        let v = bce_positive_group(&probs, &[1, 1], &[1, 1], 1, 1).unwrap();
        assert_abs_diff_eq!(v, 1.5 * std::f64::consts::LN_2, epsilon = 1e-12);
    }

    #[test]
    fn bce_group_matches_group_losses_entry() {
        let probs: ndarray::Array2<f64> = array![[0.2, 0.8], [0.6, 0.4], [0.9, 0.1], [0.3, 0.7]];
        let labels = [1, 1, 0, 1];
        let attrs = [0, 0, 1, 1];
        let ce = Array1::from_iter(
            labels
                .iter()
                .enumerate()
                .map(|(i, &y)| -probs[[i, y]].ln()),
        );
        let t = group_losses(&ce, &labels, &attrs, 2).unwrap();
        let v = bce_positive_group(&probs, &labels, &attrs, 1, 0).unwrap();
        assert_abs_diff_eq!(v, t.group(1, 0).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn bce_group_empty_errors() {
        let probs = array![[0.2, 0.8]];
        assert!(matches!(
            bce_positive_group(&probs, &[1], &[0], 1, 1),
            Err(Error::EmptyGroup { .. })
        ));
    }

    #[test]
    fn objective_kind_round_trips_names() {
        for kind in ObjectiveKind::ALL {
            assert_eq!(kind.as_str().parse::<ObjectiveKind>().unwrap(), kind);
        }
        assert!("nope".parse::<ObjectiveKind>().is_err());
    }
}
