//! Evaluation: metrics, k-fold cross-validation, hyperparameter grids,
//! instance-vote baselines, and report formatting.
//!
//! Cross-validation refits everything per fold — the scaler is fitted inside
//! `train` on the training part only, so no information leaks from test
//! folds. Grid searches reuse one seeded fold split across all cells, which
//! keeps cells comparable and ties meaningful.

use std::fmt;
use std::str::FromStr;

use crate::bag::{Bag, Label};
use crate::data::{kfold_split, Dataset};
use crate::error::{Error, Result};
use crate::features::FeatureMapSpec;
use crate::inference::predict;
use crate::learning::{train, TrainConfig};
use crate::model::Model;
use crate::potential::PotentialSpec;

/// Bag-level classification counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    /// Correct predictions over total bags.
    pub accuracy: f64,
    /// Counts indexed `[true label][predicted label]` with negative at 0 and
    /// positive at 1.
    pub confusion: [[usize; 2]; 2],
}

fn label_index(label: Label) -> usize {
    match label {
        Label::Negative => 0,
        Label::Positive => 1,
    }
}

impl Metrics {
    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        self.confusion[0][0] + self.confusion[1][1]
    }
}

/// Predict every bag of a raw dataset and aggregate counts.
///
/// The dataset is scaled and mapped through the model's own pipeline first,
/// so callers pass data in the same form they trained on.
pub fn evaluate(model: &Model, dataset: &Dataset) -> Result<Metrics> {
    let mapped = model.map_dataset(dataset)?;
    let mut confusion = [[0usize; 2]; 2];
    for bag in mapped.bags() {
        let p = predict(model, bag)?;
        confusion[label_index(bag.label())][label_index(p.label)] += 1;
    }
    let correct = confusion[0][0] + confusion[1][1];
    Ok(Metrics {
        accuracy: correct as f64 / dataset.len() as f64,
        confusion,
    })
}

/// Mean accuracy and per-fold metrics of one k-fold run.
#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub mean_accuracy: f64,
    pub folds: Vec<Metrics>,
}

/// Stratified k-fold cross-validation: train on each training part (scaler
/// fitted there), evaluate on the held-out part, average accuracies.
pub fn cross_validate(
    dataset: &Dataset,
    spec: PotentialSpec,
    map_spec: FeatureMapSpec,
    config: &TrainConfig,
    k: usize,
    seed: u64,
) -> Result<CvResult> {
    let splits = kfold_split(dataset, k, seed)?;
    let mut folds = Vec::with_capacity(splits.len());
    for (train_part, test_part) in &splits {
        let outcome = train(train_part, spec, map_spec, config)?;
        folds.push(evaluate(&outcome.model, test_part)?);
    }
    let mean_accuracy = folds.iter().map(|m| m.accuracy).sum::<f64>() / folds.len() as f64;
    Ok(CvResult {
        mean_accuracy,
        folds,
    })
}

/// One evaluated grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    pub spec: PotentialSpec,
    pub lambda: f64,
    pub result: CvResult,
}

/// Full grid-search table plus the winning cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    /// Index of the winner in `entries`.
    pub best_index: usize,
    /// All cells in evaluation order: potentials outer, lambdas inner.
    pub entries: Vec<GridEntry>,
}

impl GridSearchResult {
    pub fn best(&self) -> &GridEntry {
        &self.entries[self.best_index]
    }
}

/// Exhaustive cross-validated search over `specs × lambdas`.
///
/// Every cell shares the fold split derived from `seed`. The winner is the
/// highest mean accuracy; ties keep the earliest cell in grid order.
pub fn grid_search(
    dataset: &Dataset,
    specs: &[PotentialSpec],
    lambdas: &[f64],
    map_spec: FeatureMapSpec,
    base: &TrainConfig,
    k: usize,
    seed: u64,
) -> Result<GridSearchResult> {
    if specs.is_empty() || lambdas.is_empty() {
        return Err(Error::InvalidParameter(
            "grid search needs at least one potential and one lambda".into(),
        ));
    }
    let mut entries = Vec::with_capacity(specs.len() * lambdas.len());
    let mut best_index = 0;
    let mut best_accuracy = f64::NEG_INFINITY;
    for &spec in specs {
        for &lambda in lambdas {
            let config = TrainConfig {
                lambda,
                ..base.clone()
            };
            let result = cross_validate(dataset, spec, map_spec, &config, k, seed)?;
            if result.mean_accuracy > best_accuracy {
                best_accuracy = result.mean_accuracy;
                best_index = entries.len();
            }
            entries.push(GridEntry {
                spec,
                lambda,
                result,
            });
        }
    }
    Ok(GridSearchResult {
        best_index,
        entries,
    })
}

/// The ratio grid `ρ ∈ {0.1, 0.2, …, 1.0}`.
pub fn default_rho_grid() -> Vec<PotentialSpec> {
    (1..=10)
        .map(|i| PotentialSpec::Rmimn {
            rho: i as f64 / 10.0,
        })
        .collect()
}

/// The segment grid `K ∈ {3, 5, 10}`.
pub fn default_segment_grid() -> Vec<PotentialSpec> {
    [3, 5, 10]
        .into_iter()
        .map(|segments| PotentialSpec::Gmimn { segments })
        .collect()
}

/// The regularization grid `λ ∈ {100, 10, 1, 0.1, 0.01}`.
pub fn default_lambda_grid() -> Vec<f64> {
    vec![100.0, 10.0, 1.0, 0.1, 0.01]
}

/// How per-instance scores are turned into a bag label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoteRule {
    /// Positive iff any instance score is strictly positive.
    AtLeastOne,
    /// Positive iff strictly more than half the scores are positive;
    /// an exact split votes negative.
    Majority,
}

impl fmt::Display for VoteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VoteRule::AtLeastOne => "at_least_one",
            VoteRule::Majority => "majority",
        })
    }
}

impl FromStr for VoteRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<VoteRule> {
        match s {
            "at_least_one" => Ok(VoteRule::AtLeastOne),
            "majority" => Ok(VoteRule::Majority),
            other => Err(Error::InvalidParameter(format!(
                "unknown vote rule '{other}' (expected at_least_one or majority)"
            ))),
        }
    }
}

/// Turn per-bag instance scores (sign = instance-level decision) into bag
/// labels under a voting rule.
pub fn baseline_vote(scores: &[Vec<f64>], rule: VoteRule) -> Result<Vec<Label>> {
    if scores.is_empty() {
        return Err(Error::InvalidParameter(
            "baseline vote needs at least one bag".into(),
        ));
    }
    scores
        .iter()
        .enumerate()
        .map(|(i, bag_scores)| {
            if bag_scores.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "bag {i} has no instance scores"
                )));
            }
            let positives = bag_scores.iter().filter(|&&s| s > 0.0).count();
            let vote = match rule {
                VoteRule::AtLeastOne => positives > 0,
                VoteRule::Majority => 2 * positives > bag_scores.len(),
            };
            Ok(if vote { Label::Positive } else { Label::Negative })
        })
        .collect()
}

/// Flatten bags into single-instance bags inheriting their bag's label, with
/// ids `"{bag_id}#{instance_index}"` — the training set for an instance-level
/// baseline classifier. Errors if the generated ids collide with each other.
pub fn explode_instances(dataset: &Dataset) -> Result<Dataset> {
    let mut bags = Vec::with_capacity(dataset.instance_count());
    for bag in dataset.bags() {
        for (j, inst) in bag.instances().iter().enumerate() {
            bags.push(Bag::new(
                format!("{}#{j}", bag.id()),
                bag.label(),
                vec![inst.clone()],
            )?);
        }
    }
    Dataset::new(bags)
}

/// Per-instance decision scores for one raw bag: each instance is classified
/// as its own singleton bag and contributes its prediction margin.
pub fn instance_margins(model: &Model, bag: &Bag) -> Result<Vec<f64>> {
    bag.instances()
        .iter()
        .map(|inst| {
            let singleton = Bag::new(bag.id(), bag.label(), vec![inst.clone()])?;
            let mapped = model.map_bag(&singleton)?;
            Ok(predict(model, &mapped)?.margin)
        })
        .collect()
}

/// Aligned plain-text table of a grid search, one row per cell, with the
/// winner marked and repeated on a trailing line.
pub fn format_grid_table(result: &GridSearchResult) -> String {
    let mut rows: Vec<(String, String, String)> = Vec::with_capacity(result.entries.len());
    for entry in &result.entries {
        rows.push((
            entry.spec.to_string(),
            entry.lambda.to_string(),
            format!("{:.4}", entry.result.mean_accuracy),
        ));
    }
    let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max("potential".len());
    let w1 = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max("lambda".len());
    let mut out = format!("{:<w0$}  {:>w1$}  mean_accuracy\n", "potential", "lambda");
    for (i, (spec, lambda, acc)) in rows.iter().enumerate() {
        let marker = if i == result.best_index { "  *" } else { "" };
        out.push_str(&format!("{spec:<w0$}  {lambda:>w1$}  {acc:>13}{marker}\n"));
    }
    let best = result.best();
    out.push_str(&format!(
        "best: {} lambda={} mean_accuracy={:.4}\n",
        best.spec, best.lambda, best.result.mean_accuracy
    ));
    out
}

/// Machine-readable per-fold rows of a grid search:
/// `potential,lambda,fold,accuracy` with folds numbered from 0.
pub fn grid_csv(result: &GridSearchResult) -> String {
    let mut out = String::from("potential,lambda,fold,accuracy\n");
    for entry in &result.entries {
        for (fold, metrics) in entry.result.folds.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{fold},{}\n",
                entry.spec, entry.lambda, metrics.accuracy
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bag::FeatureVector;
    use crate::data::{synthesize, SynthParams};
    use crate::features::Scaler;
    use crate::potential::CliqueWeights;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fv(values: &[f64]) -> FeatureVector {
        FeatureVector::new(values.to_vec()).unwrap()
    }

    fn hand_model() -> Model {
        // Scaling maps [-1, 1] onto [0, 1], so every scaled instance score is
        // nonnegative under w = [1]. The clique offset of -1 on the positive
        // side sets the decision threshold: a bag is predicted positive
        // exactly when its positive-score instances sum above 0.5 in scaled
        // space, i.e. when some raw instance is clearly above 0.
        let spec = PotentialSpec::Mimn;
        Model::new(
            vec![1.0],
            CliqueWeights::new(&spec, vec![-1.0, 0.0]).unwrap(),
            spec,
            FeatureMapSpec::Identity,
            Scaler::from_bounds(vec![-1.0], vec![1.0]).unwrap(),
            false,
        )
        .unwrap()
    }

    fn tiny_dataset() -> Dataset {
        Dataset::new(vec![
            Bag::new("p1", Label::Positive, vec![fv(&[1.0]), fv(&[-1.0])]).unwrap(),
            Bag::new("p2", Label::Positive, vec![fv(&[0.5])]).unwrap(),
            Bag::new("n1", Label::Negative, vec![fv(&[-1.0])]).unwrap(),
            Bag::new("n2", Label::Negative, vec![fv(&[-0.5]), fv(&[-1.0])]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn evaluate_perfect_model() {
        let metrics = evaluate(&hand_model(), &tiny_dataset()).unwrap();
        assert_eq!(metrics.accuracy, 1.0);
        assert_eq!(metrics.confusion, [[2, 0], [0, 2]]);
        assert_eq!(metrics.total(), 4);
        assert_eq!(metrics.correct(), 4);
    }

    #[test]
    fn evaluate_zero_model_predicts_all_negative() {
        let spec = PotentialSpec::Mimn;
        let zero = Model::new(
            vec![0.0],
            CliqueWeights::zeros(&spec),
            spec,
            FeatureMapSpec::Identity,
            Scaler::from_bounds(vec![-1.0], vec![1.0]).unwrap(),
            false,
        )
        .unwrap();
        let metrics = evaluate(&zero, &tiny_dataset()).unwrap();
        assert_eq!(metrics.accuracy, 0.5); // the two negative bags
        assert_eq!(metrics.confusion, [[2, 0], [2, 0]]);
        assert_eq!(metrics.total(), 4);
    }

    #[test]
    fn evaluate_is_invariant_to_bag_order() {
        let ds = tiny_dataset();
        let mut reversed: Vec<Bag> = ds.bags().to_vec();
        reversed.reverse();
        let reversed = Dataset::new(reversed).unwrap();
        let a = evaluate(&hand_model(), &ds).unwrap();
        let b = evaluate(&hand_model(), &reversed).unwrap();
        assert_eq!(a, b);
    }

    fn separable_params() -> SynthParams {
        SynthParams {
            positive_bags: 15,
            negative_bags: 15,
            bag_size: 5,
            dim: 4,
            witness_rate: 0.5,
            contamination: 0.0,
            separation: 8.0,
            noise_sd: 0.5,
        }
    }

    fn quick_config() -> TrainConfig {
        // Step size small enough for a sum-over-bags objective of this size;
        // the default 1.0 overshoots and never improves on the zero model.
        TrainConfig {
            lambda: 0.01,
            max_iters: 400,
            step0: 1e-3,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn cross_validate_separates_clean_data_and_is_deterministic() {
        let ds = synthesize(&separable_params(), 5).unwrap();
        let cv = cross_validate(
            &ds,
            PotentialSpec::Mimn,
            FeatureMapSpec::Identity,
            &quick_config(),
            5,
            3,
        )
        .unwrap();
        assert_eq!(cv.folds.len(), 5);
        assert_eq!(cv.mean_accuracy, 1.0, "folds: {:?}", cv.folds);
        let again = cross_validate(
            &ds,
            PotentialSpec::Mimn,
            FeatureMapSpec::Identity,
            &quick_config(),
            5,
            3,
        )
        .unwrap();
        assert_eq!(cv, again);
    }

    #[test]
    fn cross_validate_supports_leave_one_out() {
        let params = SynthParams {
            positive_bags: 3,
            negative_bags: 3,
            ..separable_params()
        };
        let ds = synthesize(&params, 9).unwrap();
        let cv = cross_validate(
            &ds,
            PotentialSpec::Mimn,
            FeatureMapSpec::Identity,
            &quick_config(),
            ds.len(),
            1,
        )
        .unwrap();
        assert_eq!(cv.folds.len(), 6);
        assert!(cv.folds.iter().all(|m| m.total() == 1));
    }

    #[test]
    fn grid_search_orders_cells_and_breaks_ties_first() {
        let ds = synthesize(&separable_params(), 5).unwrap();
        let specs = [PotentialSpec::Mimn, PotentialSpec::Rmimn { rho: 0.5 }];
        let lambdas = [1.0, 0.01];
        let result = grid_search(
            &ds,
            &specs,
            &lambdas,
            FeatureMapSpec::Identity,
            &quick_config(),
            3,
            7,
        )
        .unwrap();
        assert_eq!(result.entries.len(), 4);
        // Row-major order: potentials outer, lambdas inner.
        assert_eq!(result.entries[0].spec, PotentialSpec::Mimn);
        assert_eq!(result.entries[0].lambda, 1.0);
        assert_eq!(result.entries[1].spec, PotentialSpec::Mimn);
        assert_eq!(result.entries[1].lambda, 0.01);
        assert_eq!(result.entries[2].spec, PotentialSpec::Rmimn { rho: 0.5 });
        // Ties (this data is easy everywhere) keep the earliest cell.
        let top = result.best().result.mean_accuracy;
        let first_with_top = result
            .entries
            .iter()
            .position(|e| e.result.mean_accuracy == top)
            .unwrap();
        assert_eq!(result.best_index, first_with_top);
    }

    #[test]
    fn grid_search_single_cell_and_empty_grids() {
        let ds = synthesize(&separable_params(), 5).unwrap();
        let result = grid_search(
            &ds,
            &[PotentialSpec::Mimn],
            &[0.1],
            FeatureMapSpec::Identity,
            &quick_config(),
            3,
            7,
        )
        .unwrap();
        assert_eq!(result.entries.len(), 1);
        assert_eq!(result.best_index, 0);
        assert!(grid_search(&ds, &[], &[0.1], FeatureMapSpec::Identity, &quick_config(), 3, 7).is_err());
        assert!(grid_search(&ds, &[PotentialSpec::Mimn], &[], FeatureMapSpec::Identity, &quick_config(), 3, 7).is_err());
    }

    #[test]
    fn default_grids_match_documented_values() {
        let rhos = default_rho_grid();
        assert_eq!(rhos.len(), 10);
        assert_eq!(rhos[0], PotentialSpec::Rmimn { rho: 0.1 });
        assert_eq!(rhos[9], PotentialSpec::Rmimn { rho: 1.0 });
        assert!(rhos.iter().all(|s| s.validate().is_ok()));
        assert_eq!(
            default_segment_grid(),
            vec![
                PotentialSpec::Gmimn { segments: 3 },
                PotentialSpec::Gmimn { segments: 5 },
                PotentialSpec::Gmimn { segments: 10 },
            ]
        );
        assert_eq!(default_lambda_grid(), vec![100.0, 10.0, 1.0, 0.1, 0.01]);
    }

    #[test]
    fn baseline_vote_rules() {
        let scores = vec![
            vec![-1.0, 0.2, -3.0],
            vec![-0.5, -2.0],
            vec![1.0, 2.0, -0.1],
            vec![1.0, -1.0],      // exact half positive
            vec![0.0],            // zero is not positive
        ];
        let alo = baseline_vote(&scores, VoteRule::AtLeastOne).unwrap();
        assert_eq!(
            alo,
            vec![
                Label::Positive,
                Label::Negative,
                Label::Positive,
                Label::Positive,
                Label::Negative,
            ]
        );
        let maj = baseline_vote(&scores, VoteRule::Majority).unwrap();
        assert_eq!(
            maj,
            vec![
                Label::Negative,
                Label::Negative,
                Label::Positive,
                Label::Negative,
                Label::Negative,
            ]
        );
    }

    #[test]
    fn at_least_one_votes_positive_on_superset_of_majority() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let scores: Vec<Vec<f64>> = (0..10)
                .map(|_| {
                    (0..rng.random_range(1..=7))
                        .map(|_| rng.random_range(-1.0..1.0))
                        .collect()
                })
                .collect();
            let alo = baseline_vote(&scores, VoteRule::AtLeastOne).unwrap();
            let maj = baseline_vote(&scores, VoteRule::Majority).unwrap();
            for (a, m) in alo.iter().zip(&maj) {
                assert!(!(*m == Label::Positive && *a == Label::Negative));
            }
        }
    }

    #[test]
    fn baseline_vote_rejects_empty_input() {
        assert!(baseline_vote(&[], VoteRule::Majority).is_err());
        assert!(baseline_vote(&[vec![1.0], vec![]], VoteRule::Majority).is_err());
        for s in ["at_least_one", "majority"] {
            assert_eq!(s.parse::<VoteRule>().unwrap().to_string(), s);
        }
        assert!("sometimes".parse::<VoteRule>().is_err());
    }

    #[test]
    fn explode_instances_builds_singletons() {
        let ds = tiny_dataset();
        let flat = explode_instances(&ds).unwrap();
        assert_eq!(flat.len(), ds.instance_count());
        assert!(flat.bags().iter().all(|b| b.size() == 1));
        assert_eq!(flat.bags()[0].id(), "p1#0");
        assert_eq!(flat.bags()[1].id(), "p1#1");
        assert_eq!(flat.bags()[1].label(), Label::Positive);
        assert_eq!(flat.bags()[2].id(), "p2#0");
        assert_eq!(flat.bags()[0].instances()[0], fv(&[1.0]));
    }

    #[test]
    fn instance_margins_match_singleton_predictions() {
        let model = hand_model();
        let bag = Bag::new("b", Label::Positive, vec![fv(&[1.0]), fv(&[-1.0]), fv(&[0.2])]).unwrap();
        let margins = instance_margins(&model, &bag).unwrap();
        assert_eq!(margins.len(), 3);
        assert!(margins[0] > 0.0);
        assert!(margins[1] <= 0.0);
        // Scaled value of 0.2 on [-1,1] is 0.6, so with the clique offset of
        // -1: F(+1) = -0.6 + 1.2 - 1 = -0.4 and F(-1) = -0.6, margin 0.2.
        assert!((margins[2] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn grid_reports_include_every_cell() {
        let ds = synthesize(&separable_params(), 5).unwrap();
        let result = grid_search(
            &ds,
            &[PotentialSpec::Mimn, PotentialSpec::Gmimn { segments: 3 }],
            &[1.0],
            FeatureMapSpec::Identity,
            &quick_config(),
            3,
            7,
        )
        .unwrap();
        let table = format_grid_table(&result);
        assert!(table.contains("mimn"));
        assert!(table.contains("gmimn:3"));
        assert!(table.contains("best: "));
        let csv = grid_csv(&result);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "potential,lambda,fold,accuracy");
        assert_eq!(lines.len(), 1 + 2 * 3); // two cells, three folds each
        assert!(lines[1].starts_with("mimn,1,0,"));
    }
}
