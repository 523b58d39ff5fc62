//! Adaptive batch sampler: shifts per-(label, attribute) sampling
//! probability toward the group with the larger intermediate loss, while
//! keeping the label marginals fixed. The update rule transfers
//! `alpha * class_marginal` of probability mass per step (clamped so the
//! donor never goes negative); only the within-class attribute balance
//! adapts.

use crate::dataset::GroupCounts;
use crate::error::{Error, Result};
use crate::objectives::GroupLossTable;
use crate::scalar::Scalar;
use rand::Rng;

/// Tie tolerance on the within-class loss gap; smaller gaps leave the class
/// untouched.
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerState<S: Scalar = f64> {
    probs: Vec<[S; 2]>,
    class_marginals: Vec<S>,
    alpha: S,
}

impl<S: Scalar> SamplerState<S> {
    pub fn probs(&self) -> &[[S; 2]] {
        &self.probs
    }

    pub fn class_marginals(&self) -> &[S] {
        &self.class_marginals
    }
}

/// Starts from the empirical joint distribution. Every class must have at
/// least one example; `alpha` must lie in (0, 1).
pub fn init_sampler<S: Scalar>(counts: &GroupCounts, alpha: S) -> Result<SamplerState<S>> {
    let alpha_ok = alpha > S::zero() && alpha < S::one();
    if !alpha_ok {
        return Err(Error::Validation(format!(
            "alpha must be in (0, 1), got {alpha}"
        )));
    }
    if counts.total == 0 {
        return Err(Error::Validation("empty dataset".into()));
    }
    let n = S::from(counts.total).unwrap();
    let mut probs = Vec::with_capacity(counts.num_classes());
    let mut class_marginals = Vec::with_capacity(counts.num_classes());
    for y in 0..counts.num_classes() {
        if counts.class_total(y) == 0 {
            return Err(Error::Validation(format!("class {y} has no examples")));
        }
        let p0 = S::from(counts.get(y, 0)).unwrap() / n;
        let p1 = S::from(counts.get(y, 1)).unwrap() / n;
        probs.push([p0, p1]);
        class_marginals.push(S::from(counts.class_total(y)).unwrap() / n);
    }
    Ok(SamplerState {
        probs,
        class_marginals,
        alpha,
    })
}

/// One adaptation step: within each class whose two groups are both present
/// in the table, moves `min(alpha * marginal, donor)` of probability from the
/// lower-loss group to the higher-loss one. The recipient is recomputed from
/// the class marginal, so marginals are preserved bit-for-bit.
pub fn update_probs<S: Scalar>(state: &mut SamplerState<S>, table: &GroupLossTable<S>) {
    let tie = S::from(TIE_EPS).unwrap();
    for y in 0..state.probs.len().min(table.num_classes()) {
        let (Some(l0), Some(l1)) = (table.group(y, 0), table.group(y, 1)) else {
            continue;
        };
        if (l0 - l1).abs() <= tie {
            continue;
        }
        let (hi, lo) = if l0 > l1 { (0, 1) } else { (1, 0) };
        let marginal = state.class_marginals[y];
        let delta = (state.alpha * marginal).min(state.probs[y][lo]);
        let donor = state.probs[y][lo] - delta;
        state.probs[y][lo] = donor;
        state.probs[y][hi] = marginal - donor;
    }
}

/// Draws a batch of row indices: group per example from the sampling
/// probabilities, then a uniform draw with replacement inside the group.
pub fn sample_batch<S: Scalar, R: Rng + ?Sized>(
    state: &SamplerState<S>,
    groups: &[[Vec<usize>; 2]],
    batch_size: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if batch_size == 0 {
        return Err(Error::Validation("batch_size must be >= 1".into()));
    }
    let mut cum = Vec::with_capacity(state.probs.len() * 2);
    let mut acc = 0.0f64;
    for (y, pair) in state.probs.iter().enumerate() {
        for (a, &p) in pair.iter().enumerate() {
            let p = p.to_f64().unwrap();
            if p > 0.0 && groups[y][a].is_empty() {
                return Err(Error::EmptyGroup {
                    label: y,
                    attribute: a,
                    context: "positive sampling probability but no examples".into(),
                });
            }
            acc += p;
            cum.push(acc);
        }
    }
    let cells = cum.len();
    let mut batch = Vec::with_capacity(batch_size);
    for _ in 0..batch_size {
        let u: f64 = rng.random::<f64>() * acc;
        let mut cell = cum.partition_point(|&edge| edge <= u).min(cells - 1);
        // partition_point only lands on positive-width cells (checked
        // non-empty above), except when u rounds up onto the final edge; back
        // off over zero-width cells in that case.
        while groups[cell / 2][cell % 2].is_empty() {
            cell -= 1;
        }
        let members = &groups[cell / 2][cell % 2];
        batch.push(members[rng.random_range(0..members.len())]);
    }
    Ok(batch)
}
