//! Property tests for the algebraic invariants: loss decomposition
//! identities, weight-mass conservation, metric symmetries, sampler
//! distribution validity, and Pareto dominance.

use eqopt::dataset::{downsample_balanced, group_counts, rw_weights, stratified_split, Dataset};
use eqopt::fairbatch::{init_sampler, update_probs};
use eqopt::harness::{pareto_front, ParetoPoint};
use eqopt::metrics::{confusion, f1_scores, gap_rms};
use eqopt::model::{backward, forward, init_params, Activation};
use eqopt::objectives::{
    effective_weights, group_losses, group_weights, objective_value, GroupLossTable,
    ObjectiveKind, ObjectiveSpec,
};
use ndarray::{Array1, Array2};
use proptest::prelude::*;

fn labels_attrs(n: usize, c: usize) -> impl Strategy<Value = (Vec<usize>, Vec<u8>)> {
    (
        proptest::collection::vec(0..c, n),
        proptest::collection::vec(0..2u8, n),
    )
}

fn dataset(n: usize, c: usize) -> impl Strategy<Value = Dataset> {
    labels_attrs(n, c).prop_map(move |(labels, attrs)| {
        Dataset::new(Array2::zeros((labels.len(), 2)), labels, attrs, c).unwrap()
    })
}

/// Random but internally-consistent loss table; `force_ties` makes every
/// class's two group means bitwise equal.
fn loss_table(c: usize, force_ties: bool) -> impl Strategy<Value = GroupLossTable<f64>> {
    (
        proptest::collection::vec(0usize..30, c * 2),
        proptest::collection::vec(0.01f64..5.0, c * 2),
    )
        .prop_filter_map("at least one occupied group", move |(counts, means)| {
            let total: usize = counts.iter().sum();
            if total == 0 {
                return None;
            }
            let cells: Vec<[usize; 2]> = counts.chunks(2).map(|p| [p[0], p[1]]).collect();
            let gm: Vec<[Option<f64>; 2]> = cells
                .iter()
                .zip(means.chunks(2))
                .map(|(cnt, m)| {
                    let m1 = if force_ties { m[0] } else { m[1] };
                    [
                        (cnt[0] > 0).then_some(m[0]),
                        (cnt[1] > 0).then_some(m1),
                    ]
                })
                .collect();
            Some(
                GroupLossTable::from_parts(
                    eqopt::dataset::GroupCounts {
                        counts: cells,
                        total,
                    },
                    gm,
                )
                .unwrap(),
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rw_weights_equal_group_mass(ds in dataset(60, 3)) {
        let w = rw_weights(&ds);
        let counts = group_counts(&ds);
        let mut masses = Vec::new();
        for y in 0..3 {
            for a in 0..2 {
                if counts.get(y, a) == 0 { continue; }
                let mass: f64 = (0..ds.len())
                    .filter(|&i| ds.labels()[i] == y && ds.attributes()[i] == a as u8)
                    .map(|i| w[i])
                    .sum();
                masses.push(mass);
            }
        }
        for pair in masses.windows(2) {
            prop_assert!((pair[0] - pair[1]).abs() < 1e-9, "masses {masses:?}");
        }
    }

    #[test]
    fn downsample_balances_when_it_succeeds(ds in dataset(60, 3), seed in 0u64..100) {
        match downsample_balanced(&ds, seed) {
            Ok(out) => {
                let counts = group_counts(&out);
                for y in 0..3 {
                    prop_assert_eq!(counts.get(y, 0), counts.get(y, 1));
                }
                prop_assert!(out.len() <= ds.len());
            }
            Err(eqopt::Error::EmptyGroup { label, .. }) => {
                let counts = group_counts(&ds);
                prop_assert!(counts.class_total(label) > 0);
                prop_assert!(counts.get(label, 0) == 0 || counts.get(label, 1) == 0);
            }
            Err(other) => prop_assert!(false, "unexpected error {other:?}"),
        }
    }

    #[test]
    fn split_partitions_exactly(ds in dataset(90, 2), seed in 0u64..100) {
        match stratified_split(&ds, &[0.5, 0.3, 0.2], seed) {
            Ok(parts) => {
                prop_assert_eq!(parts.iter().map(|p| p.len()).sum::<usize>(), ds.len());
                // Per-group totals across the parts match the original.
                let orig = group_counts(&ds);
                for y in 0..2 {
                    for a in 0..2 {
                        let total: usize = parts.iter().map(|p| group_counts(p).get(y, a)).sum();
                        prop_assert_eq!(total, orig.get(y, a));
                    }
                }
            }
            Err(eqopt::Error::Validation(_)) => {
                let counts = group_counts(&ds);
                let small = (0..2).any(|y| (0..2).any(|a| {
                    let m = counts.get(y, a);
                    m > 0 && m < 3
                }));
                prop_assert!(small, "split failed without an undersized group");
            }
            Err(other) => prop_assert!(false, "unexpected error {other:?}"),
        }
    }

    #[test]
    fn softmax_rows_sum_to_one(seed in 0u64..1000, scale in 1.0f64..100.0) {
        let mut params = init_params::<f64>(4, 6, 3, seed);
        params.w3.mapv_inplace(|v| v * scale);
        params.b3.mapv_inplace(|v| v + scale);
        let features = Array2::from_shape_fn((8, 4), |(i, j)| ((i * 7 + j) as f64).sin() * 3.0);
        let labels = vec![0, 1, 2, 0, 1, 2, 0, 1];
        let fwd = forward(&params, &features, &labels, Activation::Tanh).unwrap();
        for row in fwd.probabilities.rows() {
            let sum: f64 = row.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9, "row sum {sum}");
        }
    }

    #[test]
    fn backward_is_linear_in_weights(seed in 0u64..500) {
        let params = init_params::<f64>(3, 4, 2, seed);
        let features = Array2::from_shape_fn((6, 3), |(i, j)| ((i + 2 * j) as f64).cos());
        let labels = vec![0, 1, 0, 1, 0, 1];
        let w1 = Array1::from_shape_fn(6, |i| (i as f64 * 0.7).sin());
        let w2 = Array1::from_shape_fn(6, |i| (i as f64 * 1.3).cos());
        let ga = backward(&params, &features, &labels, &w1, Activation::Tanh).unwrap();
        let gb = backward(&params, &features, &labels, &w2, Activation::Tanh).unwrap();
        let gsum = backward(
            &params,
            &features,
            &labels,
            &(&w1 + &w2),
            Activation::Tanh,
        )
        .unwrap();
        for (pa, (pb, ps)) in [
            (&ga.w1, (&gb.w1, &gsum.w1)),
            (&ga.w2, (&gb.w2, &gsum.w2)),
            (&ga.w3, (&gb.w3, &gsum.w3)),
        ] {
            for ((&a, &b), &s) in pa.iter().zip(pb.iter()).zip(ps.iter()) {
                prop_assert!((a + b - s).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn loss_decomposition_identity((labels, attrs) in labels_attrs(50, 3),
                                   losses in proptest::collection::vec(0.0f64..10.0, 50)) {
        let ce = Array1::from_vec(losses);
        let table = group_losses(&ce, &labels, &attrs, 3).unwrap();
        let n = labels.len() as f64;
        let mut recomposed = 0.0;
        for y in 0..3 {
            for a in 0..2 {
                if let Some(l) = table.group(y, a) {
                    recomposed += table.counts.get(y, a) as f64 * l;
                }
            }
        }
        prop_assert!((n * table.overall - recomposed).abs() < 1e-9);
    }

    #[test]
    fn weighted_sum_identity_for_eo_cla(table in loss_table(3, false), lambda in 0.0f64..3.0) {
        let spec = ObjectiveSpec::new(ObjectiveKind::EoCla, lambda).unwrap();
        let gw = group_weights(&table, &spec);
        let mut weighted = 0.0;
        for y in 0..3 {
            for a in 0..2 {
                if let (Some(w), Some(l)) = (gw[y][a], table.group(y, a)) {
                    weighted += w * l;
                }
            }
        }
        prop_assert!((weighted - objective_value(&table, &spec)).abs() < 1e-9);
    }

    #[test]
    fn weighted_sum_identity_at_ties(table in loss_table(3, true), lambda in 0.0f64..3.0) {
        let spec = ObjectiveSpec::new(ObjectiveKind::EoCla, lambda).unwrap();
        let gw = group_weights(&table, &spec);
        let mut weighted = 0.0;
        for y in 0..3 {
            for a in 0..2 {
                if let (Some(w), Some(l)) = (gw[y][a], table.group(y, a)) {
                    weighted += w * l;
                }
            }
        }
        prop_assert!((weighted - objective_value(&table, &spec)).abs() < 1e-9);
    }

    #[test]
    fn group_signs_are_opposite_or_zero(table in loss_table(4, false)) {
        for y in 0..4 {
            if let (Some(l0), Some(l1), Some(class)) =
                (table.group(y, 0), table.group(y, 1), table.class(y))
            {
                let s0 = (l0 - class).signum() * f64::from(l0 != class);
                let s1 = (l1 - class).signum() * f64::from(l1 != class);
                prop_assert!(s0 * s1 <= 0.0, "signs {s0} {s1}");
            }
        }
    }

    #[test]
    fn max_minus_min_reformulation(table in loss_table(3, false), lambda in 0.0f64..3.0) {
        // The class-wise penalty equals lambda * sum_y (max_a - min_a) when
        // both groups are present.
        let spec = ObjectiveSpec::new(ObjectiveKind::EoCla, lambda).unwrap();
        let mut spread = 0.0;
        for y in 0..3 {
            match (table.group(y, 0), table.group(y, 1)) {
                (Some(l0), Some(l1)) => spread += l0.max(l1) - l0.min(l1),
                // A lone group matches its class mean: no contribution.
                _ => {}
            }
        }
        let penalty = objective_value(&table, &spec) - table.overall;
        prop_assert!((penalty - lambda * spread).abs() < 1e-9);
    }

    #[test]
    fn effective_weights_ce_reduction((labels, attrs) in labels_attrs(40, 2),
                                      losses in proptest::collection::vec(0.1f64..5.0, 40)) {
        let ce = Array1::from_vec(losses);
        let table = group_losses(&ce, &labels, &attrs, 2).unwrap();
        let spec = ObjectiveSpec::<f64>::ce();
        let ew = effective_weights(&table, &spec, &labels, &attrs).unwrap();
        for &w in ew.per_example.iter() {
            prop_assert!((w - 1.0 / 40.0).abs() < 1e-12);
        }
    }

    #[test]
    fn micro_f1_equals_pooled_accuracy((labels, _) in labels_attrs(30, 4),
                                       (preds, attrs) in labels_attrs(30, 4)) {
        let conf = confusion(&preds, &labels, &attrs, 4).unwrap();
        let (micro, _) = f1_scores(&conf);
        // Independent pooled route: micro-F1 from summed TP/FP/FN.
        let tp: usize = (0..4).map(|y| conf.matrix[[y, y]]).sum();
        let fp: usize = conf.n - tp;
        let fn_: usize = conf.n - tp;
        let precision = tp as f64 / (tp + fp) as f64;
        let recall = tp as f64 / (tp + fn_) as f64;
        let pooled = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        prop_assert!((micro - pooled).abs() < 1e-12);
        let accuracy = tp as f64 / conf.n as f64;
        prop_assert!((micro - accuracy).abs() < 1e-12);
    }

    #[test]
    fn gap_invariant_under_attribute_swap((labels, attrs) in labels_attrs(40, 3),
                                          (preds, _) in labels_attrs(40, 3)) {
        let conf = confusion(&preds, &labels, &attrs, 3).unwrap();
        let swapped: Vec<u8> = attrs.iter().map(|&a| 1 - a).collect();
        let conf_swapped = confusion(&preds, &labels, &swapped, 3).unwrap();
        match (gap_rms(&conf), gap_rms(&conf_swapped)) {
            (Ok((_, g1, _)), Ok((_, g2, _))) => prop_assert!((g1 - g2).abs() < 1e-12),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "swap changed includability"),
        }
    }

    #[test]
    fn gap_invariant_under_class_permutation((labels, attrs) in labels_attrs(40, 3),
                                             (preds, _) in labels_attrs(40, 3)) {
        let perm = [2usize, 0, 1];
        let plabels: Vec<usize> = labels.iter().map(|&y| perm[y]).collect();
        let ppreds: Vec<usize> = preds.iter().map(|&y| perm[y]).collect();
        let a = gap_rms(&confusion(&preds, &labels, &attrs, 3).unwrap());
        let b = gap_rms(&confusion(&ppreds, &plabels, &attrs, 3).unwrap());
        match (a, b) {
            (Ok((_, g1, _)), Ok((_, g2, _))) => prop_assert!((g1 - g2).abs() < 1e-12),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "permutation changed includability"),
        }
    }

    #[test]
    fn metrics_invariant_under_duplication((labels, attrs) in labels_attrs(30, 3),
                                           (preds, _) in labels_attrs(30, 3)) {
        let dup = |v: &[usize]| [v, v].concat();
        let dup8 = |v: &[u8]| [v, v].concat();
        let once = confusion(&preds, &labels, &attrs, 3).unwrap();
        let twice = confusion(&dup(&preds), &dup(&labels), &dup8(&attrs), 3).unwrap();
        let (m1, ma1) = f1_scores(&once);
        let (m2, ma2) = f1_scores(&twice);
        prop_assert!((m1 - m2).abs() < 1e-12);
        prop_assert!((ma1 - ma2).abs() < 1e-12);
        if let (Ok((_, g1, _)), Ok((_, g2, _))) = (gap_rms(&once), gap_rms(&twice)) {
            prop_assert!((g1 - g2).abs() < 1e-12);
        }
    }

    #[test]
    fn sampler_stays_valid_distribution(losses in proptest::collection::vec(0.01f64..4.0, 16)) {
        let counts = eqopt::dataset::GroupCounts {
            counts: vec![[11, 39], [37, 13]],
            total: 100,
        };
        let mut state = init_sampler::<f64>(&counts, 0.1).unwrap();
        let marginals = state.class_marginals().to_vec();
        for step in losses.chunks(4) {
            let table = GroupLossTable::from_parts(
                counts.clone(),
                vec![
                    [Some(step[0]), Some(step[1])],
                    [Some(step[2]), Some(step[3])],
                ],
            )
            .unwrap();
            // The disadvantaged group's probability never decreases.
            let before = state.probs().to_vec();
            update_probs(&mut state, &table);
            for y in 0..2 {
                let hi = if step[2 * y] > step[2 * y + 1] { 0 } else { 1 };
                if (step[2 * y] - step[2 * y + 1]).abs() > 1e-12 {
                    prop_assert!(state.probs()[y][hi] >= before[y][hi]);
                }
                prop_assert_eq!(state.probs()[y][0] + state.probs()[y][1], marginals[y]);
                prop_assert!(state.probs()[y][0] >= 0.0);
                prop_assert!(state.probs()[y][1] >= 0.0);
            }
        }
        let total: f64 = state.probs().iter().map(|p| p[0] + p[1]).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pareto_front_matches_brute_force(raw in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..40)) {
        let points: Vec<ParetoPoint> = raw
            .iter()
            .enumerate()
            .map(|(i, &(performance, gap))| ParetoPoint {
                // Quantize so duplicates and ties actually occur.
                performance: (performance * 20.0).round() / 20.0,
                gap: (gap * 20.0).round() / 20.0,
                key: i.to_string(),
            })
            .collect();
        let fast = pareto_front(&points);
        let mut brute: Vec<ParetoPoint> = points
            .iter()
            .filter(|p| {
                !points.iter().any(|q| {
                    q.performance >= p.performance
                        && q.gap <= p.gap
                        && (q.performance > p.performance || q.gap < p.gap)
                })
            })
            .cloned()
            .collect();
        brute.sort_by(|a, b| {
            a.performance
                .partial_cmp(&b.performance)
                .unwrap()
                .then(a.gap.partial_cmp(&b.gap).unwrap())
                .then(a.key.cmp(&b.key))
        });
        prop_assert_eq!(fast, brute);
    }
}
