//! Seeded self-check suites: fast inference against the brute-force oracle,
//! loss-augmented inference against exhaustive maximization, and the
//! analytic subgradient against central finite differences.
//!
//! Each case derives its own seed as `base_seed + case_index`, and failures
//! report that per-case seed — rerunning with `--seed <reported> --cases 1`
//! replays exactly the failing configuration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bag::{Bag, FeatureVector, Label};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::features::{FeatureMapSpec, Scaler};
use crate::inference::{
    brute_force_map, count_sweep, loss_augmented, map_labeling, CountSweep, BRUTE_FORCE_LIMIT,
};
use crate::learning::objective_and_subgradient;
use crate::model::Model;
use crate::potential::{CliqueWeights, PotentialSpec};

/// Central-difference step used by the gradient check.
pub const GRADIENT_FD_STEP: f64 = 1e-5;
/// Per-coordinate relative tolerance of the gradient check.
pub const GRADIENT_REL_TOL: f64 = 1e-4;
/// Minimum gap between competing argmax candidates for a point to count as
/// uniquely maximized (and therefore differentiable along the check step).
pub const ARGMAX_GAP: f64 = 1e-3;

/// One failed case.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckFailure {
    /// Per-case seed that replays the failure.
    pub seed: u64,
    /// Case index within the run.
    pub case: usize,
    pub message: String,
}

/// Outcome of one self-check suite.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub passed: usize,
    pub total: usize,
    pub failures: Vec<CheckFailure>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.passed == self.total
    }
}

/// Number of distinct cases with at least one failure.
fn failed_case_count(failures: &[CheckFailure]) -> usize {
    failures
        .iter()
        .map(|f| f.case)
        .collect::<std::collections::HashSet<_>>()
        .len()
}

fn validate_case_counts(cases: usize, max_bag: usize) -> Result<()> {
    if cases == 0 {
        return Err(Error::InvalidParameter("case count must be positive".into()));
    }
    if max_bag == 0 || max_bag > BRUTE_FORCE_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "max bag size must lie in 1..={BRUTE_FORCE_LIMIT}, got {max_bag}"
        )));
    }
    Ok(())
}

fn random_spec(rng: &mut ChaCha8Rng) -> PotentialSpec {
    match rng.random_range(0..3) {
        0 => PotentialSpec::Mimn,
        1 => PotentialSpec::Rmimn {
            rho: rng.random_range(1..=10) as f64 / 10.0,
        },
        _ => PotentialSpec::Gmimn {
            segments: [3, 5, 10][rng.random_range(0..3)],
        },
    }
}

fn random_model(rng: &mut ChaCha8Rng, d: usize) -> Model {
    let spec = random_spec(rng);
    let w: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
    let clique: Vec<f64> = (0..spec.weight_len())
        .map(|_| rng.random_range(-2.0..2.0))
        .collect();
    Model::new(
        w,
        CliqueWeights::new(&spec, clique).expect("generated weights are valid"),
        spec,
        FeatureMapSpec::Identity,
        Scaler::identity(d),
        false,
    )
    .expect("generated model is valid")
}

fn random_bag(rng: &mut ChaCha8Rng, id: &str, d: usize, max_bag: usize) -> Bag {
    let m = rng.random_range(1..=max_bag);
    let label = if rng.random_bool(0.5) {
        Label::Positive
    } else {
        Label::Negative
    };
    let instances = (0..m)
        .map(|_| {
            FeatureVector::new((0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
                .expect("generated features are finite")
        })
        .collect();
    Bag::new(id, label, instances).expect("generated bag is valid")
}

/// One random `(model, bag)` pair in mapped feature space.
fn inference_case(seed: u64, max_bag: usize) -> (Model, Bag) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.random_range(1..=5);
    let model = random_model(&mut rng, d);
    let bag = random_bag(&mut rng, "case", d, max_bag);
    (model, bag)
}

/// Compare [`map_labeling`] with [`brute_force_map`] on seeded random cases,
/// both bag labels per case. Scores must agree bit for bit.
pub fn map_equivalence_cases(cases: usize, max_bag: usize, seed: u64) -> Result<CheckReport> {
    validate_case_counts(cases, max_bag)?;
    let mut failures = Vec::new();
    for case in 0..cases {
        let case_seed = seed.wrapping_add(case as u64);
        let (model, bag) = inference_case(case_seed, max_bag);
        for y in [Label::Positive, Label::Negative] {
            let fast = map_labeling(&model, &bag, y)?;
            let slow = brute_force_map(&model, &bag, y)?;
            if fast.score.to_bits() != slow.score.to_bits() {
                failures.push(CheckFailure {
                    seed: case_seed,
                    case,
                    message: format!(
                        "map scores differ for y={}: fast {} vs brute {}",
                        y.to_i32(),
                        fast.score,
                        slow.score
                    ),
                });
            }
        }
    }
    let failed = failed_case_count(&failures);
    Ok(CheckReport {
        passed: cases - failed,
        total: cases,
        failures,
    })
}

/// Compare [`loss_augmented`] with an exhaustive maximization of
/// `Δ(y, y_true) + score` over both bag labels and all labelings.
pub fn loss_augmented_cases(cases: usize, max_bag: usize, seed: u64) -> Result<CheckReport> {
    validate_case_counts(cases, max_bag)?;
    let mut failures = Vec::new();
    for case in 0..cases {
        let case_seed = seed.wrapping_add(case as u64);
        let (model, bag) = inference_case(case_seed, max_bag);
        for y_true in [Label::Positive, Label::Negative] {
            let keep = brute_force_map(&model, &bag, y_true)?;
            let flip = brute_force_map(&model, &bag, y_true.flip())?;
            let flip_value = 1.0 + flip.score;
            let expected = if flip_value > keep.score {
                flip_value
            } else {
                keep.score
            };
            let got = loss_augmented(&model, &bag, y_true)?;
            if got.value.to_bits() != expected.to_bits() {
                failures.push(CheckFailure {
                    seed: case_seed,
                    case,
                    message: format!(
                        "loss-augmented values differ for y_true={}: fast {} vs brute {}",
                        y_true.to_i32(),
                        got.value,
                        expected
                    ),
                });
            }
        }
    }
    let failed = failed_case_count(&failures);
    Ok(CheckReport {
        passed: cases - failed,
        total: cases,
        failures,
    })
}

fn top_two_gap_ok<I: IntoIterator<Item = f64>>(values: I, gap: f64) -> bool {
    let mut top = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for v in values {
        if v > top {
            second = top;
            top = v;
        } else if v > second {
            second = v;
        }
    }
    second == f64::NEG_INFINITY || top - second >= gap
}

fn boundary_gap_ok(sweep: &CountSweep, gap: f64) -> bool {
    let m = sweep.order.len();
    let (k_star, _) = sweep
        .candidates
        .iter()
        .copied()
        .fold((usize::MAX, f64::NEG_INFINITY), |best, (k, s)| {
            if s > best.1 {
                (k, s)
            } else {
                best
            }
        });
    if k_star == 0 || k_star >= m {
        return true;
    }
    let included = sweep.t[sweep.order[k_star - 1]];
    let excluded = sweep.t[sweep.order[k_star]];
    included - excluded >= gap
}

/// A point is uniquely maximized when, for every bag, the winning count
/// candidate beats the runner-up by [`ARGMAX_GAP`] on both the plain and the
/// loss-augmented side, and the sorted-gain boundary at each chosen count is
/// separated by the same gap — so the maximizers cannot switch within the
/// finite-difference step.
fn unique_argmaxes(model: &Model, dataset: &Dataset, gap: f64) -> Result<bool> {
    for bag in dataset.bags() {
        let y = bag.label();
        let sweep_true = count_sweep(model, bag, y)?;
        let sweep_flip = count_sweep(model, bag, y.flip())?;
        let plain = sweep_true.candidates.iter().map(|&(_, s)| s);
        if !top_two_gap_ok(plain, gap) {
            return Ok(false);
        }
        let augmented = sweep_true
            .candidates
            .iter()
            .map(|&(_, s)| s)
            .chain(sweep_flip.candidates.iter().map(|&(_, s)| 1.0 + s));
        if !top_two_gap_ok(augmented, gap) {
            return Ok(false);
        }
        if !boundary_gap_ok(&sweep_true, gap) || !boundary_gap_ok(&sweep_flip, gap) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn gradient_case(seed: u64) -> (Model, Dataset, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.random_range(1..=4);
    let model = random_model(&mut rng, d);
    let n_bags = rng.random_range(2..=4);
    let bags = (0..n_bags)
        .map(|i| random_bag(&mut rng, &format!("bag{i}"), d, 8))
        .collect();
    let dataset = Dataset::new(bags).expect("generated dataset is valid");
    let lambda = rng.random_range(0.1..2.0);
    (model, dataset, lambda)
}

/// Check the analytic subgradient against central finite differences of the
/// objective at seeded random points with unique argmaxes.
///
/// Points whose argmaxes are not unique (so the objective is locally
/// non-smooth) are skipped and do not count; generation continues until
/// `points` accepted points were checked.
pub fn gradient_cases(points: usize, seed: u64) -> Result<CheckReport> {
    if points == 0 {
        return Err(Error::InvalidParameter("point count must be positive".into()));
    }
    let mut failures = Vec::new();
    let mut accepted = 0;
    let mut attempt = 0u64;
    let max_attempts = (points as u64) * 200;
    while accepted < points && attempt < max_attempts {
        let case_seed = seed.wrapping_add(attempt);
        attempt += 1;
        let (model, dataset, lambda) = gradient_case(case_seed);
        if !unique_argmaxes(&model, &dataset, ARGMAX_GAP)? {
            continue;
        }
        let case = accepted;
        accepted += 1;
        let (_, grad) = objective_and_subgradient(&model, &dataset, lambda)?;
        let flat = model.flat_weights();
        for c in 0..flat.len() {
            let mut plus = flat.clone();
            plus[c] += GRADIENT_FD_STEP;
            let mut minus = flat.clone();
            minus[c] -= GRADIENT_FD_STEP;
            let obj_plus =
                objective_and_subgradient(&model.with_flat_weights(&plus)?, &dataset, lambda)?.0;
            let obj_minus =
                objective_and_subgradient(&model.with_flat_weights(&minus)?, &dataset, lambda)?.0;
            let fd = (obj_plus - obj_minus) / (2.0 * GRADIENT_FD_STEP);
            let rel = (fd - grad[c]).abs() / grad[c].abs().max(1e-3);
            if rel > GRADIENT_REL_TOL {
                failures.push(CheckFailure {
                    seed: case_seed,
                    case,
                    message: format!(
                        "coordinate {c}: finite difference {fd} vs analytic {} (rel {rel:.2e})",
                        grad[c]
                    ),
                });
                break;
            }
        }
    }
    if accepted < points {
        failures.push(CheckFailure {
            seed,
            case: accepted,
            message: format!(
                "only {accepted}/{points} unique-argmax points found in {max_attempts} attempts"
            ),
        });
    }
    let failed = failed_case_count(&failures);
    Ok(CheckReport {
        passed: accepted.saturating_sub(failed),
        total: points,
        failures,
    })
}
