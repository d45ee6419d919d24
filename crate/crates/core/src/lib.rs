//! Multiple-instance learning with cardinality-based bag potentials.
//!
//! A bag is a set of feature vectors with one shared binary label. The model
//! scores a bag label `y` together with a hidden per-instance labeling `h` as
//! the sum of per-instance linear scores and a clique potential that depends
//! only on the number of positive instances. Three potential families are
//! provided: one positive instance suffices ([`potential::PotentialSpec::Mimn`]),
//! at least a fixed fraction must be positive
//! ([`potential::PotentialSpec::Rmimn`]), and a piecewise family that scores
//! the positive fraction in segments ([`potential::PotentialSpec::Gmimn`]).
//!
//! Because the clique potential only sees the count, exact inference over the
//! `2^m` labelings reduces to sorting instances by score and sweeping over
//! counts ([`inference::map_labeling`]). Training minimizes a max-margin
//! objective by subgradient descent ([`learning::train`]), with optional
//! monotone feature scaling and kernel feature maps ([`features`]).
//!
//! ```
//! use milnet::bag::{Bag, FeatureVector, Label};
//! use milnet::data::Dataset;
//! use milnet::eval::evaluate;
//! use milnet::features::FeatureMapSpec;
//! use milnet::learning::{train, TrainConfig};
//! use milnet::potential::PotentialSpec;
//!
//! let bag = |id: &str, label, xs: &[f64]| {
//!     let instances = xs.iter().map(|&v| FeatureVector::new(vec![v]).unwrap()).collect();
//!     Bag::new(id, label, instances).unwrap()
//! };
//! let dataset = Dataset::new(vec![
//!     bag("p1", Label::Positive, &[0.9, 0.1]),
//!     bag("p2", Label::Positive, &[0.8, 0.0]),
//!     bag("n1", Label::Negative, &[0.1, 0.0]),
//!     bag("n2", Label::Negative, &[0.2, 0.1]),
//! ])
//! .unwrap();
//! let config = TrainConfig { lambda: 0.01, max_iters: 100, ..TrainConfig::default() };
//! let outcome = train(&dataset, PotentialSpec::Mimn, FeatureMapSpec::Identity, &config).unwrap();
//! let metrics = evaluate(&outcome.model, &dataset).unwrap();
//! assert_eq!(metrics.accuracy, 1.0);
//! ```

pub mod bag;
pub mod data;
pub mod error;
pub mod eval;
pub mod features;
pub mod inference;
pub mod learning;
pub mod model;
pub mod potential;
pub mod selfcheck;

pub use bag::{Bag, FeatureVector, InstanceLabeling, Label};
pub use data::Dataset;
pub use error::{Error, Result};
pub use features::{FeatureMapSpec, KernelKind, Scaler};
pub use inference::{loss_augmented, map_labeling, predict, Prediction};
pub use learning::{train, TrainConfig, TrainOutcome};
pub use model::Model;
pub use potential::{CliqueWeights, PotentialSpec};
