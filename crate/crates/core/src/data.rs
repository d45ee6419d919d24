//! Datasets: MIL-CSV parsing and writing, synthetic generation, fold splits.
//!
//! The on-disk format is one instance per line:
//!
//! ```text
//! bag_id,label,f1,...,fd
//! ```
//!
//! with `label` in `{-1, 1}`, constant within a bag, and an optional header
//! line that is recognized by its non-numeric third field. Instances of one
//! bag need not be contiguous; bags keep their first-appearance order.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::bag::{Bag, FeatureVector, Label};
use crate::error::{Error, Result};

/// Ordered, non-empty collection of bags with one shared feature dimension
/// and unique bag ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    bags: Vec<Bag>,
}

impl Dataset {
    pub fn new(bags: Vec<Bag>) -> Result<Self> {
        let Some(first) = bags.first() else {
            return Err(Error::InvalidParameter(
                "dataset must contain at least one bag".into(),
            ));
        };
        let dim = first.dim();
        let mut seen = HashMap::with_capacity(bags.len());
        for bag in &bags {
            if bag.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: bag.dim(),
                });
            }
            if seen.insert(bag.id().to_owned(), ()).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "duplicate bag id '{}'",
                    bag.id()
                )));
            }
        }
        Ok(Dataset { bags })
    }

    pub fn bags(&self) -> &[Bag] {
        &self.bags
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Feature dimension shared by all bags.
    pub fn dim(&self) -> usize {
        self.bags[0].dim()
    }

    /// Number of positive and negative bags.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self
            .bags
            .iter()
            .filter(|b| b.label() == Label::Positive)
            .count();
        (pos, self.bags.len() - pos)
    }

    /// Total number of instances across all bags.
    pub fn instance_count(&self) -> usize {
        self.bags.iter().map(Bag::size).sum()
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parse MIL-CSV text into a dataset.
///
/// Errors name the offending 1-based line: ragged feature rows, labels
/// outside `{-1, 1}`, a bag appearing with two different labels, non-finite
/// or unparseable feature values, blank interior lines, and empty input.
pub fn parse_mil_csv(text: &str) -> Result<Dataset> {
    struct PendingBag {
        id: String,
        label: Label,
        first_line: usize,
        instances: Vec<FeatureVector>,
    }

    let mut order: Vec<PendingBag> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut dim: Option<usize> = None;

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if i == 0 && (fields.len() < 3 || fields[2].parse::<f64>().is_err()) {
            // Header line: third field is not a number.
            continue;
        }
        if line.is_empty() {
            return Err(parse_err(line_no, "blank line"));
        }
        if fields.len() < 3 {
            return Err(parse_err(
                line_no,
                "expected bag_id,label and at least one feature",
            ));
        }
        let id = fields[0];
        if id.is_empty() {
            return Err(parse_err(line_no, "empty bag id"));
        }
        let label_raw: i32 = fields[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("label must be 1 or -1, got '{}'", fields[1])))?;
        let label = Label::from_i32(label_raw)
            .map_err(|_| parse_err(line_no, format!("label must be 1 or -1, got '{label_raw}'")))?;

        let mut values = Vec::with_capacity(fields.len() - 2);
        for field in &fields[2..] {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(line_no, format!("invalid feature value '{field}'")))?;
            if !v.is_finite() {
                return Err(parse_err(line_no, format!("non-finite feature value '{field}'")));
            }
            values.push(v);
        }
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(parse_err(
                    line_no,
                    format!("row has {} features, expected {d}", values.len()),
                ));
            }
            Some(_) => {}
        }
        let fv = FeatureVector::new(values).expect("validated above");

        match index.get(id) {
            Some(&at) => {
                let bag = &mut order[at];
                if bag.label != label {
                    return Err(parse_err(
                        line_no,
                        format!(
                            "bag '{id}' has conflicting labels (first seen at line {})",
                            bag.first_line
                        ),
                    ));
                }
                bag.instances.push(fv);
            }
            None => {
                index.insert(id.to_owned(), order.len());
                order.push(PendingBag {
                    id: id.to_owned(),
                    label,
                    first_line: line_no,
                    instances: vec![fv],
                });
            }
        }
    }

    if order.is_empty() {
        return Err(parse_err(1, "no instance rows"));
    }
    let bags = order
        .into_iter()
        .map(|p| Bag::new(p.id, p.label, p.instances).expect("validated above"))
        .collect();
    Dataset::new(bags)
}

/// Write a dataset in canonical MIL-CSV form: no header, bags contiguous in
/// dataset order, floats in their shortest round-trip representation, LF
/// line endings. `parse_mil_csv` inverts it exactly, bit-for-bit.
pub fn write_mil_csv(dataset: &Dataset) -> String {
    let mut out = String::new();
    for bag in dataset.bags() {
        for inst in bag.instances() {
            out.push_str(bag.id());
            out.push(',');
            out.push_str(&bag.label().to_i32().to_string());
            for v in inst.values() {
                out.push(',');
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
    }
    out
}

/// Parameters for [`synthesize`].
///
/// Positive bags receive exactly `ceil(witness_rate * bag_size)` instances
/// from the concept component; negative bags receive exactly
/// `floor(contamination * bag_size)`. Concept and background are isotropic
/// Gaussians placed symmetrically on the all-ones diagonal so their means sit
/// `separation` apart.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub positive_bags: usize,
    pub negative_bags: usize,
    pub bag_size: usize,
    pub dim: usize,
    /// Fraction of concept instances per positive bag, in `(0, 1]`.
    pub witness_rate: f64,
    /// Fraction of concept instances per negative bag, in `[0, 1)`.
    pub contamination: f64,
    /// Euclidean distance between the concept and background means.
    pub separation: f64,
    /// Per-coordinate Gaussian noise.
    pub noise_sd: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            positive_bags: 50,
            negative_bags: 50,
            bag_size: 10,
            dim: 20,
            witness_rate: 0.5,
            contamination: 0.0,
            separation: 4.0,
            noise_sd: 1.0,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.positive_bags == 0 || self.negative_bags == 0 {
            return bad("need at least one bag of each class".into());
        }
        if self.bag_size == 0 {
            return bad("bag size must be at least 1".into());
        }
        if self.dim == 0 {
            return bad("feature dimension must be at least 1".into());
        }
        if !(self.witness_rate.is_finite() && self.witness_rate > 0.0 && self.witness_rate <= 1.0)
        {
            return bad(format!(
                "witness rate must lie in (0, 1], got {}",
                self.witness_rate
            ));
        }
        if !(self.contamination.is_finite()
            && self.contamination >= 0.0
            && self.contamination < 1.0)
        {
            return bad(format!(
                "contamination must lie in [0, 1), got {}",
                self.contamination
            ));
        }
        if !(self.separation.is_finite() && self.separation >= 0.0) {
            return bad(format!(
                "separation must be non-negative, got {}",
                self.separation
            ));
        }
        if !(self.noise_sd.is_finite() && self.noise_sd > 0.0) {
            return bad(format!("noise sd must be positive, got {}", self.noise_sd));
        }
        Ok(())
    }

    /// Concept instances per positive bag.
    pub fn witnesses_per_positive_bag(&self) -> usize {
        (self.witness_rate * self.bag_size as f64).ceil() as usize
    }

    /// Concept instances per negative bag.
    pub fn concept_per_negative_bag(&self) -> usize {
        (self.contamination * self.bag_size as f64).floor() as usize
    }
}

/// Generate a synthetic dataset; identical `(params, seed)` give identical
/// datasets across runs.
pub fn synthesize(params: &SynthParams, seed: u64) -> Result<Dataset> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, params.noise_sd)
        .map_err(|e| Error::InvalidParameter(format!("noise distribution: {e}")))?;

    // Means sit at +/- separation/2 along the unit diagonal.
    let half = params.separation / 2.0 / (params.dim as f64).sqrt();
    let witnesses = params.witnesses_per_positive_bag();
    let contaminants = params.concept_per_negative_bag();

    let mut sample_bag = |id: String, label: Label, concept_count: usize| -> Result<Bag> {
        let mut instances = Vec::with_capacity(params.bag_size);
        for i in 0..params.bag_size {
            let mean = if i < concept_count { half } else { -half };
            let values: Vec<f64> = (0..params.dim)
                .map(|_| mean + noise.sample(&mut rng))
                .collect();
            instances.push(FeatureVector::new(values)?);
        }
        Bag::new(id, label, instances)
    };

    let mut bags = Vec::with_capacity(params.positive_bags + params.negative_bags);
    for b in 0..params.positive_bags {
        bags.push(sample_bag(
            format!("pos{:04}", b + 1),
            Label::Positive,
            witnesses,
        )?);
    }
    for b in 0..params.negative_bags {
        bags.push(sample_bag(
            format!("neg{:04}", b + 1),
            Label::Negative,
            contaminants,
        )?);
    }
    Dataset::new(bags)
}

/// Stratified k-fold split at the bag level.
///
/// Bags of each class are shuffled with a seeded generator and dealt
/// round-robin, so fold sizes differ by at most one and class proportions
/// stay balanced. Returns `(train, test)` pairs whose test sets are disjoint
/// and together cover the dataset; within each part, bags keep dataset order.
pub fn kfold_split(dataset: &Dataset, k: usize, seed: u64) -> Result<Vec<(Dataset, Dataset)>> {
    let n = dataset.len();
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "fold count must be at least 2, got {k}"
        )));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "fold count {k} exceeds the {n} bags available"
        )));
    }

    let mut pos: Vec<usize> = Vec::new();
    let mut neg: Vec<usize> = Vec::new();
    for (i, bag) in dataset.bags().iter().enumerate() {
        match bag.label() {
            Label::Positive => pos.push(i),
            Label::Negative => neg.push(i),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);

    let mut fold_of = vec![0usize; n];
    for (slot, &bag_ix) in pos.iter().chain(neg.iter()).enumerate() {
        fold_of[bag_ix] = slot % k;
    }

    let mut splits = Vec::with_capacity(k);
    for fold in 0..k {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, bag) in dataset.bags().iter().enumerate() {
            if fold_of[i] == fold {
                test.push(bag.clone());
            } else {
                train.push(bag.clone());
            }
        }
        splits.push((Dataset::new(train)?, Dataset::new(test)?));
    }
    Ok(splits)
}
