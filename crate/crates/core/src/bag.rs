//! Bags of instances, binary labels, and per-instance labelings.

use crate::error::{Error, Result};

/// Binary label, used both for bags and for latent instance labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    /// Numeric sign of the label: `+1.0` or `-1.0`.
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    /// Integer form, `1` or `-1`.
    pub fn to_i32(self) -> i32 {
        match self {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }

    /// Parse from the integer form; anything but `1`/`-1` is rejected.
    pub fn from_i32(value: i32) -> Result<Self> {
        match value {
            1 => Ok(Label::Positive),
            -1 => Ok(Label::Negative),
            other => Err(Error::InvalidParameter(format!(
                "label must be 1 or -1, got {other}"
            ))),
        }
    }

    /// The opposite label.
    pub fn flip(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

/// Dense feature vector with finite entries and at least one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "feature vector must have at least one dimension".into(),
            ));
        }
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(FeatureVector { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A labeled bag: a non-empty set of instances sharing one feature dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Bag {
    id: String,
    label: Label,
    instances: Vec<FeatureVector>,
}

impl Bag {
    pub fn new(id: impl Into<String>, label: Label, instances: Vec<FeatureVector>) -> Result<Self> {
        let id = id.into();
        let Some(first) = instances.first() else {
            return Err(Error::InvalidParameter(format!(
                "bag '{id}' must contain at least one instance"
            )));
        };
        let dim = first.dim();
        for inst in &instances {
            if inst.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: inst.dim(),
                });
            }
        }
        Ok(Bag {
            id,
            label,
            instances,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn instances(&self) -> &[FeatureVector] {
        &self.instances
    }

    /// Number of instances in the bag.
    pub fn size(&self) -> usize {
        self.instances.len()
    }

    /// Feature dimension shared by every instance.
    pub fn dim(&self) -> usize {
        self.instances[0].dim()
    }
}

/// An assignment of a binary label to every instance of a bag.
///
/// The positive count is fixed at construction, so `positive_count() +
/// negative_count()` always equals `len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceLabeling {
    labels: Vec<Label>,
    positive_count: usize,
}

impl InstanceLabeling {
    pub fn new(labels: Vec<Label>) -> Self {
        let positive_count = labels.iter().filter(|l| **l == Label::Positive).count();
        InstanceLabeling {
            labels,
            positive_count,
        }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn positive_count(&self) -> usize {
        self.positive_count
    }

    pub fn negative_count(&self) -> usize {
        self.labels.len() - self.positive_count
    }
}
