//! The model: instance weights, clique weights, and the preprocessing
//! metadata (scaler, feature map, optional bias) needed to take raw bags all
//! the way to a joint score.
//!
//! Scoring itself is linear: a labeled bag's score is the clique potential
//! for its positive-count plus the sum of signed instance potentials. The
//! `score` function here is the single canonical evaluation path — the fast
//! inference routine and the brute-force oracle both return scores computed
//! through it, which is what makes their outputs comparable bit for bit.

use crate::bag::{Bag, FeatureVector, InstanceLabeling, Label};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::features::{FeatureMapSpec, Scaler};
use crate::potential::{clique_value, CliqueValue, CliqueWeights, PotentialSpec};

/// Immutable trained (or in-training) model.
///
/// `w_instance` lives in mapped feature space: its length is the feature
/// map's output dimension for the scaler's input dimension, plus one when a
/// constant bias feature is appended.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    w_instance: Vec<f64>,
    clique: CliqueWeights,
    spec: PotentialSpec,
    map_spec: FeatureMapSpec,
    scaler: Scaler,
    append_bias: bool,
}

impl Model {
    pub fn new(
        w_instance: Vec<f64>,
        clique: CliqueWeights,
        spec: PotentialSpec,
        map_spec: FeatureMapSpec,
        scaler: Scaler,
        append_bias: bool,
    ) -> Result<Model> {
        spec.validate()?;
        map_spec.validate()?;
        if clique.len() != spec.weight_len() {
            return Err(Error::DimensionMismatch {
                expected: spec.weight_len(),
                got: clique.len(),
            });
        }
        let expected = map_spec.output_dim(scaler.dim()) + usize::from(append_bias);
        if w_instance.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: w_instance.len(),
            });
        }
        if let Some(index) = w_instance.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Model {
            w_instance,
            clique,
            spec,
            map_spec,
            scaler,
            append_bias,
        })
    }

    /// All-zero weights for the given configuration; the training start point.
    pub fn zeros(
        spec: PotentialSpec,
        map_spec: FeatureMapSpec,
        scaler: Scaler,
        append_bias: bool,
    ) -> Result<Model> {
        let clique = CliqueWeights::zeros(&spec);
        let d = map_spec.output_dim(scaler.dim()) + usize::from(append_bias);
        Model::new(vec![0.0; d], clique, spec, map_spec, scaler, append_bias)
    }

    pub fn w_instance(&self) -> &[f64] {
        &self.w_instance
    }

    pub fn clique(&self) -> &CliqueWeights {
        &self.clique
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn map_spec(&self) -> &FeatureMapSpec {
        &self.map_spec
    }

    pub fn scaler(&self) -> &Scaler {
        &self.scaler
    }

    pub fn append_bias(&self) -> bool {
        self.append_bias
    }

    /// Raw feature dimension the model expects before scaling and mapping.
    pub fn input_dim(&self) -> usize {
        self.scaler.dim()
    }

    /// Mapped dimension, i.e. the length of `w_instance`.
    pub fn mapped_dim(&self) -> usize {
        self.w_instance.len()
    }

    /// Scale, map, and (optionally) bias-extend one raw instance.
    pub fn map_instance(&self, x: &FeatureVector) -> Result<FeatureVector> {
        let mapped = self.map_spec.apply(&self.scaler.apply(x)?)?;
        if self.append_bias {
            let mut values = mapped.values().to_vec();
            values.push(1.0);
            FeatureVector::new(values)
        } else {
            Ok(mapped)
        }
    }

    /// Map every instance of a raw bag, keeping id and label.
    pub fn map_bag(&self, bag: &Bag) -> Result<Bag> {
        let instances = bag
            .instances()
            .iter()
            .map(|x| self.map_instance(x))
            .collect::<Result<Vec<_>>>()?;
        Bag::new(bag.id(), bag.label(), instances)
    }

    /// Map every bag of a raw dataset.
    pub fn map_dataset(&self, dataset: &Dataset) -> Result<Dataset> {
        let bags = dataset
            .bags()
            .iter()
            .map(|b| self.map_bag(b))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(bags)
    }

    /// Instance and clique weights concatenated into one vector — the `w`
    /// that the regularizer and subgradient act on.
    pub fn flat_weights(&self) -> Vec<f64> {
        let mut flat = self.w_instance.clone();
        flat.extend_from_slice(self.clique.values());
        flat
    }

    /// Rebuild the model with new weights taken from a flat vector laid out
    /// as in [`Model::flat_weights`].
    pub fn with_flat_weights(&self, flat: &[f64]) -> Result<Model> {
        let d = self.w_instance.len();
        let expected = d + self.clique.len();
        if flat.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: flat.len(),
            });
        }
        let clique = CliqueWeights::new(&self.spec, flat[d..].to_vec())?;
        Model::new(
            flat[..d].to_vec(),
            clique,
            self.spec,
            self.map_spec,
            self.scaler.clone(),
            self.append_bias,
        )
    }
}

pub(crate) fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Signed instance potential `h · ⟨w, x⟩`.
pub fn instance_potential(w_instance: &[f64], x: &FeatureVector, h: Label) -> Result<f64> {
    if w_instance.len() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: w_instance.len(),
            got: x.dim(),
        });
    }
    Ok(h.sign() * dot(w_instance, x.values()))
}

/// Joint score of a fully labeled bag under a fixed bag label.
///
/// Returns `Infeasible` when the clique family forbids the labeling's
/// positive-count for `y`; otherwise the clique value plus the instance
/// potentials, accumulated clique-first then instances in bag order. Every
/// score the crate reports flows through this accumulation order.
///
/// The bag must already be in mapped feature space (see [`Model::map_bag`]).
pub fn score(model: &Model, bag: &Bag, h: &InstanceLabeling, y: Label) -> Result<CliqueValue> {
    if h.len() != bag.size() {
        return Err(Error::LabelingMismatch {
            labeling: h.len(),
            bag: bag.size(),
        });
    }
    if bag.dim() != model.w_instance.len() {
        return Err(Error::DimensionMismatch {
            expected: model.w_instance.len(),
            got: bag.dim(),
        });
    }
    let clique = clique_value(&model.spec, &model.clique, h.positive_count(), bag.size(), y)?;
    let CliqueValue::Finite {
        value,
        weight_index,
    } = clique
    else {
        return Ok(CliqueValue::Infeasible);
    };
    let mut acc = value;
    for (x, &hi) in bag.instances().iter().zip(h.labels()) {
        acc += hi.sign() * dot(&model.w_instance, x.values());
    }
    Ok(CliqueValue::Finite {
        value: acc,
        weight_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(values: &[f64]) -> FeatureVector {
        FeatureVector::new(values.to_vec()).unwrap()
    }

    fn plain_model(w: &[f64], clique: &[f64]) -> Model {
        let spec = PotentialSpec::Mimn;
        Model::new(
            w.to_vec(),
            CliqueWeights::new(&spec, clique.to_vec()).unwrap(),
            spec,
            FeatureMapSpec::Identity,
            Scaler::identity(w.len()),
            false,
        )
        .unwrap()
    }

    #[test]
    fn instance_potential_examples() {
        let w = [1.0, -1.0];
        assert_eq!(instance_potential(&w, &fv(&[1.0, 0.0]), Label::Positive).unwrap(), 1.0);
        assert_eq!(instance_potential(&w, &fv(&[0.0, 1.0]), Label::Negative).unwrap(), 1.0);
        assert_eq!(instance_potential(&[0.0, 0.0], &fv(&[3.0, 4.0]), Label::Positive).unwrap(), 0.0);
        assert!(instance_potential(&w, &fv(&[1.0]), Label::Positive).is_err());
    }

    #[test]
    fn score_substitution_example() {
        let model = plain_model(&[1.0, -1.0], &[0.3, 0.0]);
        let bag = Bag::new(
            "b",
            Label::Positive,
            vec![fv(&[1.0, 0.0]), fv(&[0.0, 1.0])],
        )
        .unwrap();
        let h = InstanceLabeling::new(vec![Label::Positive, Label::Negative]);
        let got = score(&model, &bag, &h, Label::Positive).unwrap();
        assert_eq!(
            got,
            CliqueValue::Finite {
                value: 2.3,
                weight_index: 0
            }
        );
    }

    #[test]
    fn score_zero_model_is_zero_on_feasible_labelings() {
        let model = plain_model(&[0.0, 0.0], &[0.0, 0.0]);
        let bag = Bag::new("b", Label::Negative, vec![fv(&[5.0, 1.0]), fv(&[2.0, 2.0])]).unwrap();
        let all_neg = InstanceLabeling::new(vec![Label::Negative, Label::Negative]);
        assert_eq!(
            score(&model, &bag, &all_neg, Label::Negative).unwrap().value(),
            Some(0.0)
        );
    }

    #[test]
    fn score_reports_infeasible_labelings() {
        let model = plain_model(&[1.0, 1.0], &[0.5, -0.5]);
        let bag = Bag::new("b", Label::Negative, vec![fv(&[1.0, 0.0]), fv(&[0.0, 1.0])]).unwrap();
        let with_positive = InstanceLabeling::new(vec![Label::Positive, Label::Negative]);
        assert_eq!(
            score(&model, &bag, &with_positive, Label::Negative).unwrap(),
            CliqueValue::Infeasible
        );
        let all_neg = InstanceLabeling::new(vec![Label::Negative; 2]);
        assert_eq!(
            score(&model, &bag, &all_neg, Label::Positive).unwrap(),
            CliqueValue::Infeasible
        );
    }

    #[test]
    fn score_checks_lengths() {
        let model = plain_model(&[1.0, -1.0], &[0.3, 0.0]);
        let bag = Bag::new("b", Label::Positive, vec![fv(&[1.0, 0.0])]).unwrap();
        let too_long = InstanceLabeling::new(vec![Label::Positive, Label::Positive]);
        assert!(matches!(
            score(&model, &bag, &too_long, Label::Positive),
            Err(Error::LabelingMismatch { .. })
        ));
        let narrow_bag = Bag::new("n", Label::Positive, vec![fv(&[1.0])]).unwrap();
        let one = InstanceLabeling::new(vec![Label::Positive]);
        assert!(matches!(
            score(&model, &narrow_bag, &one, Label::Positive),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn model_validates_weight_lengths() {
        let spec = PotentialSpec::Mimn;
        let clique = CliqueWeights::zeros(&spec);
        assert!(matches!(
            Model::new(
                vec![0.0; 3],
                clique.clone(),
                spec,
                FeatureMapSpec::Identity,
                Scaler::identity(2),
                false,
            ),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
        // Quadratic map on d=2 gives 5 features; bias makes 6.
        assert!(Model::new(
            vec![0.0; 6],
            clique.clone(),
            spec,
            FeatureMapSpec::Quadratic,
            Scaler::identity(2),
            true,
        )
        .is_ok());
        let gmimn = PotentialSpec::Gmimn { segments: 4 };
        assert!(matches!(
            Model::new(
                vec![0.0; 2],
                clique,
                gmimn,
                FeatureMapSpec::Identity,
                Scaler::identity(2),
                false,
            ),
            Err(Error::DimensionMismatch { expected: 8, got: 2 })
        ));
        assert!(Model::new(
            vec![0.0, f64::NAN],
            CliqueWeights::zeros(&spec),
            spec,
            FeatureMapSpec::Identity,
            Scaler::identity(2),
            false,
        )
        .is_err());
    }

    #[test]
    fn map_bag_scales_maps_and_appends_bias() {
        let spec = PotentialSpec::Mimn;
        let scaler = Scaler::from_bounds(vec![0.0, 0.0], vec![2.0, 4.0]).unwrap();
        let model = Model::new(
            vec![0.0; 6],
            CliqueWeights::zeros(&spec),
            spec,
            FeatureMapSpec::Quadratic,
            scaler,
            true,
        )
        .unwrap();
        let bag = Bag::new("b", Label::Positive, vec![fv(&[2.0, 0.0])]).unwrap();
        let mapped = model.map_bag(&bag).unwrap();
        assert_eq!(mapped.id(), "b");
        assert_eq!(mapped.label(), Label::Positive);
        // scaled [1, 0] -> quadratic [1,0,1,0,0] -> bias [1,0,1,0,0,1]
        assert_eq!(mapped.instances()[0].values(), &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn flat_weights_round_trip() {
        let spec = PotentialSpec::Rmimn { rho: 0.5 };
        let model = Model::new(
            vec![0.25, -1.5],
            CliqueWeights::new(&spec, vec![0.75, -0.125]).unwrap(),
            spec,
            FeatureMapSpec::Identity,
            Scaler::identity(2),
            false,
        )
        .unwrap();
        let flat = model.flat_weights();
        assert_eq!(flat, vec![0.25, -1.5, 0.75, -0.125]);
        let rebuilt = model.with_flat_weights(&flat).unwrap();
        assert_eq!(rebuilt, model);
        let moved = model.with_flat_weights(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(moved.w_instance(), &[1.0, 2.0]);
        assert_eq!(moved.clique().values(), &[3.0, 4.0]);
        assert!(model.with_flat_weights(&[1.0, 2.0, 3.0]).is_err());
        assert!(model.with_flat_weights(&[1.0, 2.0, 3.0, f64::NAN]).is_err());
    }
}
