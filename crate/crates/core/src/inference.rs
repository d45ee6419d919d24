//! Exact MAP inference over instance labels.
//!
//! For a fixed bag label the joint score depends on the labeling only
//! through which instances are positive, and flipping instance `i` to
//! positive changes the score by `2⟨w, xᵢ⟩` regardless of the rest. So the
//! best labeling with exactly `k` positives takes the `k` largest gains, and
//! the argmax is found by sorting once and sweeping the feasible counts —
//! `O(m log m)` total. [`brute_force_map`] enumerates all `2^m` labelings
//! instead and exists to hold the fast path accountable.

use crate::bag::{Bag, InstanceLabeling, Label};
use crate::error::{Error, Result};
use crate::model::{dot, score, Model};
use crate::potential::{clique_value, feasible_counts, CliqueValue};

/// Largest bag size [`brute_force_map`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Outcome of MAP inference for one `(bag, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResult {
    /// Maximizing instance labeling.
    pub labeling: InstanceLabeling,
    /// Its joint score.
    pub score: f64,
    /// Number of positive instances in the labeling.
    pub k_star: usize,
}

/// Outcome of bag classification.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// Higher-scoring bag label; exact ties go to negative.
    pub label: Label,
    /// MAP labeling under the predicted bag label.
    pub labeling: InstanceLabeling,
    /// Score difference `F(+1) − F(−1)`.
    pub margin: f64,
}

/// Outcome of loss-augmented inference.
#[derive(Debug, Clone, PartialEq)]
pub struct LossAugmented {
    /// Maximizing bag label; exact ties keep the true label.
    pub label: Label,
    /// MAP labeling under that bag label.
    pub labeling: InstanceLabeling,
    /// `max_y [Δ(y, y_true) + F(y)]`.
    pub value: f64,
}

/// Per-count objectives for one `(bag, y)`: everything the count sweep knows
/// before the argmax is taken. Shared with the self-check module, which uses
/// the candidate gaps to filter out cases with non-unique argmaxes.
pub(crate) struct CountSweep {
    /// Instance indices ordered by decreasing gain (ties: ascending index).
    pub order: Vec<usize>,
    /// Raw instance potentials `tᵢ = ⟨w, xᵢ⟩` in bag order.
    pub t: Vec<f64>,
    /// `(k, s_k)` for each feasible count, ascending in `k`.
    pub candidates: Vec<(usize, f64)>,
}

impl CountSweep {
    /// Argmax over candidates; ties resolved toward the smallest `k`.
    fn best(&self) -> (usize, f64) {
        let mut best = self.candidates[0];
        for &(k, s) in &self.candidates[1..] {
            if s > best.1 {
                best = (k, s);
            }
        }
        best
    }
}

pub(crate) fn count_sweep(model: &Model, bag: &Bag, y: Label) -> Result<CountSweep> {
    if bag.dim() != model.w_instance().len() {
        return Err(Error::DimensionMismatch {
            expected: model.w_instance().len(),
            got: bag.dim(),
        });
    }
    let m = bag.size();
    let t: Vec<f64> = bag
        .instances()
        .iter()
        .map(|x| dot(model.w_instance(), x.values()))
        .collect();

    // Gain of flipping instance i to positive is 2tᵢ; sorting by tᵢ gives the
    // same order.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| t[b].total_cmp(&t[a]).then(a.cmp(&b)));

    // prefix[k] = sum of the k largest gains.
    let mut prefix = Vec::with_capacity(m + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &i in &order {
        acc += 2.0 * t[i];
        prefix.push(acc);
    }
    let base: f64 = t.iter().map(|v| -v).sum();

    let candidates = feasible_counts(model.spec(), m, y)?
        .into_iter()
        .map(|k| {
            let clique = clique_value(model.spec(), model.clique(), k, m, y)?
                .value()
                .expect("feasible_counts returned an infeasible count");
            Ok((k, base + prefix[k] + clique))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CountSweep {
        order,
        t,
        candidates,
    })
}

fn labeling_for_count(sweep: &CountSweep, k: usize) -> InstanceLabeling {
    let mut labels = vec![Label::Negative; sweep.order.len()];
    for &i in &sweep.order[..k] {
        labels[i] = Label::Positive;
    }
    InstanceLabeling::new(labels)
}

/// Exact MAP instance labeling for a fixed bag label.
///
/// Ties between counts resolve to the smallest feasible `k`; ties in the
/// gain sort resolve to the lower original index. The reported score is
/// recomputed through [`score`]'s canonical accumulation, so it is directly
/// comparable with [`brute_force_map`].
pub fn map_labeling(model: &Model, bag: &Bag, y: Label) -> Result<InferenceResult> {
    let sweep = count_sweep(model, bag, y)?;
    let (k_star, _) = sweep.best();
    let labeling = labeling_for_count(&sweep, k_star);
    let value = score(model, bag, &labeling, y)?
        .value()
        .expect("argmax count is feasible");
    Ok(InferenceResult {
        labeling,
        score: value,
        k_star,
    })
}

/// Classify a bag by running MAP inference under both bag labels.
///
/// `margin = F(+1) − F(−1)`; an exact tie predicts negative.
pub fn predict(model: &Model, bag: &Bag) -> Result<Prediction> {
    let pos = map_labeling(model, bag, Label::Positive)?;
    let neg = map_labeling(model, bag, Label::Negative)?;
    let margin = pos.score - neg.score;
    let (label, winner) = if pos.score > neg.score {
        (Label::Positive, pos)
    } else {
        (Label::Negative, neg)
    };
    Ok(Prediction {
        label,
        labeling: winner.labeling,
        margin,
    })
}

/// Maximize `Δ(y, y_true) + F(y)` over bag labels, with `Δ` the 0/1 loss.
///
/// An exact tie keeps `y_true` (the zero-loss side), which zeroes that bag's
/// subgradient contribution at equality.
pub fn loss_augmented(model: &Model, bag: &Bag, y_true: Label) -> Result<LossAugmented> {
    let keep = map_labeling(model, bag, y_true)?;
    let flip = map_labeling(model, bag, y_true.flip())?;
    let flip_value = 1.0 + flip.score;
    if flip_value > keep.score {
        Ok(LossAugmented {
            label: y_true.flip(),
            labeling: flip.labeling,
            value: flip_value,
        })
    } else {
        Ok(LossAugmented {
            label: y_true,
            labeling: keep.labeling,
            value: keep.score,
        })
    }
}

/// Exhaustive MAP over all `2^m` labelings; the oracle for [`map_labeling`].
///
/// Scores flow through the same canonical accumulation, so on uniquely
/// maximized cases the two agree bit for bit. Ties between labelings resolve
/// to the first in mask order (instance `i` positive iff bit `i` set).
pub fn brute_force_map(model: &Model, bag: &Bag, y: Label) -> Result<InferenceResult> {
    let m = bag.size();
    if m > BRUTE_FORCE_LIMIT {
        return Err(Error::BagTooLarge {
            m,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut best: Option<InferenceResult> = None;
    for mask in 0u32..(1u32 << m) {
        let labels: Vec<Label> = (0..m)
            .map(|i| {
                if mask & (1 << i) != 0 {
                    Label::Positive
                } else {
                    Label::Negative
                }
            })
            .collect();
        let labeling = InstanceLabeling::new(labels);
        let CliqueValue::Finite { value, .. } = score(model, bag, &labeling, y)? else {
            continue;
        };
        if best.as_ref().is_none_or(|b| value > b.score) {
            let k_star = labeling.positive_count();
            best = Some(InferenceResult {
                labeling,
                score: value,
                k_star,
            });
        }
    }
    best.ok_or_else(|| {
        Error::InvalidPotential(format!(
            "no feasible labeling for m={m}, y={}",
            y.to_i32()
        ))
    })
}
