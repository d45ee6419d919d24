//! Error type shared across the library.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failures from construction, parsing, inference, and training.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// A vector had a different length than the context requires.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An instance labeling does not have one label per bag instance.
    #[error("labeling has {labeling} entries but the bag holds {bag} instances")]
    LabelingMismatch { labeling: usize, bag: usize },

    /// Feature and weight values must be finite.
    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },

    /// A positive-instance count larger than the bag itself.
    #[error("positive count {m_plus} exceeds bag size {m}")]
    CountExceedsBag { m_plus: usize, m: usize },

    /// Invalid clique-potential parameter (rho out of range, zero segments, ...).
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    /// Invalid hyperparameter, generator setting, or split request.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A count configuration the clique potential forbids was requested directly.
    #[error("infeasible configuration: {m_plus} of {m} instances positive under bag label {y}")]
    InfeasibleClique { m_plus: usize, m: usize, y: i32 },

    /// Guard for exhaustive enumeration over all 2^m labelings.
    #[error("bag too large for exhaustive enumeration: {m} instances (limit {limit})")]
    BagTooLarge { m: usize, limit: usize },

    /// Malformed MIL-CSV input; `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Training needs at least one bag of each label.
    #[error("dataset contains a single class; training requires both labels")]
    SingleClass,

    /// The training objective left the finite range (step size too large, degenerate data).
    #[error("objective became non-finite at iteration {iteration}")]
    NonFiniteObjective { iteration: usize },

    /// Additive kernels and their feature maps are defined on non-negative inputs.
    #[error("negative input at position {index}; additive kernels require non-negative features")]
    NegativeKernelInput { index: usize },

    /// Inconsistent model pieces (weight lengths, feature pipeline, ...).
    #[error("invalid model: {0}")]
    InvalidModel(String),
}
