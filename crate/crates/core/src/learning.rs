//! Max-margin training: the regularized hinge objective over bags, its
//! subgradient via loss-augmented inference, and a deterministic batch
//! subgradient-descent loop with best-iterate return.
//!
//! For each bag the loss term is `L − R`, where `L` maximizes the 0/1-loss-
//! augmented score over both bag labels and `R` is the MAP score under the
//! true label. Both maximizations are exact, so `L ≥ R` always and the
//! objective is bounded below by the regularizer. Subgradients come from the
//! joint feature vectors of the two argmaxes; every accumulation runs in
//! dataset order so repeated runs are bit-identical.

use crate::bag::{Bag, InstanceLabeling, Label};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::features::{FeatureMapSpec, Scaler};
use crate::inference::{loss_augmented, map_labeling};
use crate::model::Model;
use crate::potential::{clique_indicator, CliqueIndicator, PotentialSpec};

/// Iterations without sufficient relative improvement before training stops.
const STALL_LIMIT: usize = 20;

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Regularization strength; must be positive.
    pub lambda: f64,
    /// Maximum subgradient steps.
    pub max_iters: usize,
    /// Initial step size `η₀` of the schedule `η_t = η₀ / (1 + t/t₀)`.
    pub step0: f64,
    /// Schedule decay constant `t₀`.
    pub step_decay: f64,
    /// Carried for config stability; the batch optimizer is deterministic
    /// and never draws from it.
    pub seed: u64,
    /// Relative objective improvement under which an iteration counts as
    /// stalled; training stops after 20 consecutive stalled iterations.
    pub stop_tol: f64,
    /// Append a constant-1 feature after the feature map, giving the
    /// otherwise bias-free instance potential an affine term.
    pub append_bias: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda: 1.0,
            max_iters: 300,
            step0: 1.0,
            step_decay: 50.0,
            seed: 0,
            stop_tol: 1e-6,
            append_bias: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if !(self.step0.is_finite() && self.step0 > 0.0) {
            return bad(format!("step0 must be positive, got {}", self.step0));
        }
        if !(self.step_decay.is_finite() && self.step_decay > 0.0) {
            return bad(format!(
                "step_decay must be positive, got {}",
                self.step_decay
            ));
        }
        if !(self.stop_tol.is_finite() && self.stop_tol >= 0.0) {
            return bad(format!(
                "stop_tol must be nonnegative, got {}",
                self.stop_tol
            ));
        }
        Ok(())
    }
}

/// Joint feature vector `Ψ(X, h, y)` of a labeled bag: the part multiplying
/// the instance weights and the one-hot part multiplying the clique weights.
#[derive(Debug, Clone, PartialEq)]
pub struct JointFeature {
    /// `Σᵢ hᵢ·xᵢ` in mapped feature space.
    pub instance: Vec<f64>,
    /// One-hot indicator of the clique weight slot that `(m⁺, m, y)` selects.
    pub clique: CliqueIndicator,
}

/// Build `Ψ(X, h, y)` for a feasible configuration.
///
/// The score of `(bag, h, y)` equals `⟨w_instance, instance⟩ +
/// ⟨clique weights, clique⟩` (up to floating-point association), which is
/// what makes the objective piecewise linear in the weights.
pub fn joint_feature(
    spec: &PotentialSpec,
    bag: &Bag,
    h: &InstanceLabeling,
    y: Label,
) -> Result<JointFeature> {
    if h.len() != bag.size() {
        return Err(Error::LabelingMismatch {
            labeling: h.len(),
            bag: bag.size(),
        });
    }
    let clique = clique_indicator(spec, h.positive_count(), bag.size(), y)?;
    let mut instance = vec![0.0; bag.dim()];
    for (x, &hi) in bag.instances().iter().zip(h.labels()) {
        let sign = hi.sign();
        for (acc, &v) in instance.iter_mut().zip(x.values()) {
            *acc += sign * v;
        }
    }
    Ok(JointFeature { instance, clique })
}

fn accumulate(g: &mut [f64], d: usize, psi: &JointFeature, scale: f64) {
    for (gi, v) in g[..d].iter_mut().zip(&psi.instance) {
        *gi += scale * v;
    }
    g[d + psi.clique.index] += scale;
}

/// Regularized hinge objective and one subgradient, in one pass.
///
/// Objective: `Σₙ (Lⁿ − Rⁿ) + (λ/2)·‖w‖²` with the norm over instance and
/// clique weights concatenated. Subgradient: `Σₙ [Ψ(h*_L, y*_L) − Ψ(h*_R,
/// yₙ)] + λ·w`, laid out like [`Model::flat_weights`]. Bags must already be
/// in mapped feature space; terms accumulate in dataset order.
pub fn objective_and_subgradient(
    model: &Model,
    dataset: &Dataset,
    lambda: f64,
) -> Result<(f64, Vec<f64>)> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    let d = model.w_instance().len();
    let flat = model.flat_weights();
    let mut g = vec![0.0; flat.len()];
    let mut obj = 0.0;
    for bag in dataset.bags() {
        let y = bag.label();
        let l = loss_augmented(model, bag, y)?;
        let r = map_labeling(model, bag, y)?;
        obj += l.value - r.score;
        let psi_l = joint_feature(model.spec(), bag, &l.labeling, l.label)?;
        let psi_r = joint_feature(model.spec(), bag, &r.labeling, y)?;
        accumulate(&mut g, d, &psi_l, 1.0);
        accumulate(&mut g, d, &psi_r, -1.0);
    }
    obj += 0.5 * lambda * flat.iter().map(|v| v * v).sum::<f64>();
    for (gi, wi) in g.iter_mut().zip(&flat) {
        *gi += lambda * wi;
    }
    Ok((obj, g))
}

/// Regularized hinge objective of a model on mapped bags.
pub fn objective(model: &Model, dataset: &Dataset, lambda: f64) -> Result<f64> {
    Ok(objective_and_subgradient(model, dataset, lambda)?.0)
}

/// One subgradient of the objective (flat layout, instance part first).
pub fn subgradient(model: &Model, dataset: &Dataset, lambda: f64) -> Result<Vec<f64>> {
    Ok(objective_and_subgradient(model, dataset, lambda)?.1)
}

/// A trained model together with its optimization trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// The lowest-objective iterate encountered.
    pub model: Model,
    /// Objective values per recorded iterate; index 0 is the zero
    /// initialization, index `t` the state after `t` steps.
    pub objectives: Vec<f64>,
    /// Index into `objectives` of the returned model.
    pub best_iteration: usize,
}

/// Train a model from zero-initialized weights.
///
/// Fits the scaler on `dataset`, maps it, and runs batch subgradient descent
/// with step size `η_t = η₀ / (1 + t/t₀)`, returning the iterate with the
/// lowest recorded objective. Stops early when the best objective fails to
/// improve by `stop_tol` (relatively) for 20 consecutive iterations.
/// Deterministic given the dataset order and config.
pub fn train(
    dataset: &Dataset,
    spec: PotentialSpec,
    map_spec: FeatureMapSpec,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    let (pos, neg) = dataset.class_counts();
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let scaler = Scaler::fit(dataset);
    let zero = Model::zeros(spec, map_spec, scaler, config.append_bias)?;
    let mapped = zero.map_dataset(dataset)?;

    let mut current = zero.flat_weights();
    let (first_obj, mut grad) = objective_and_subgradient(&zero, &mapped, config.lambda)?;
    if !first_obj.is_finite() {
        return Err(Error::NonFiniteObjective { iteration: 0 });
    }
    let mut objectives = vec![first_obj];
    let mut best = first_obj;
    let mut best_iteration = 0;
    let mut best_weights = current.clone();
    let mut stall = 0;

    for t in 0..config.max_iters {
        let eta = config.step0 / (1.0 + t as f64 / config.step_decay);
        for (w, g) in current.iter_mut().zip(&grad) {
            *w -= eta * g;
        }
        if current.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteObjective { iteration: t + 1 });
        }
        let candidate = zero.with_flat_weights(&current)?;
        let (obj, g) = objective_and_subgradient(&candidate, &mapped, config.lambda)?;
        if !obj.is_finite() {
            return Err(Error::NonFiniteObjective { iteration: t + 1 });
        }
        objectives.push(obj);
        grad = g;
        if obj < best {
            let rel = (best - obj) / best.abs().max(1e-12);
            best = obj;
            best_iteration = t + 1;
            best_weights.copy_from_slice(&current);
            if rel < config.stop_tol {
                stall += 1;
            } else {
                stall = 0;
            }
        } else {
            stall += 1;
        }
        if stall >= STALL_LIMIT {
            break;
        }
    }

    Ok(TrainOutcome {
        model: zero.with_flat_weights(&best_weights)?,
        objectives,
        best_iteration,
    })
}
