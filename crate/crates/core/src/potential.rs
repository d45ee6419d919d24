//! Cardinality clique potentials.
//!
//! The bag-level part of the joint score depends on the latent instance
//! labeling only through the number of positives `m_plus` out of `m`
//! instances, together with the bag label `y`. Three families are supported:
//!
//! * [`PotentialSpec::Mimn`] — a positive bag must contain at least one
//!   positive instance; a negative bag must contain none.
//! * [`PotentialSpec::Rmimn`] — a positive bag must have a positive fraction
//!   `m_plus / m >= rho`; a negative bag must stay below `rho`.
//! * [`PotentialSpec::Gmimn`] — the unit interval of positive fractions is cut
//!   into `K` equal segments, each carrying its own learnable weight per bag
//!   label; only the all-negative (for `y = +1`) and all-positive (for
//!   `y = -1`) extremes are forbidden.
//!
//! Infeasible configurations are represented explicitly by
//! [`CliqueValue::Infeasible`] rather than by a sentinel score.

use crate::bag::Label;
use crate::error::{Error, Result};

/// Weight slot of `w_c^+` for the two-weight families.
const W_POS: usize = 0;
/// Weight slot of `w_c^-` for the two-weight families.
const W_NEG: usize = 1;

/// Which clique-potential family scores the count configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialSpec {
    /// At-least-one-witness rule.
    Mimn,
    /// Ratio rule: positive bags need `m_plus / m >= rho` with `0 < rho <= 1`.
    Rmimn { rho: f64 },
    /// Generalized rule with `segments >= 1` equal fraction segments.
    Gmimn { segments: usize },
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PotentialSpec::Mimn => Ok(()),
            PotentialSpec::Rmimn { rho } => {
                if rho.is_finite() && rho > 0.0 && rho <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidPotential(format!(
                        "rho must be in (0,1], got {rho}"
                    )))
                }
            }
            PotentialSpec::Gmimn { segments } => {
                if segments >= 1 {
                    Ok(())
                } else {
                    Err(Error::InvalidPotential(
                        "segment count must be at least 1".into(),
                    ))
                }
            }
        }
    }

    /// Length of the clique weight vector this family uses.
    pub fn weight_len(&self) -> usize {
        match *self {
            PotentialSpec::Mimn | PotentialSpec::Rmimn { .. } => 2,
            PotentialSpec::Gmimn { segments } => 2 * segments,
        }
    }

    /// Weight slot for the configuration `(m_plus, m, y)`, or `None` when the
    /// family forbids it.
    ///
    /// For `Gmimn` the slots are `0..K` for `y = +1` (segment `s` covering
    /// fractions in `((s-1)/K, s/K]`) followed by `K..2K` for `y = -1`
    /// (segment `s` covering `[(s-1)/K, s/K)`).
    pub fn weight_index(&self, m_plus: usize, m: usize, y: Label) -> Option<usize> {
        debug_assert!(m >= 1 && m_plus <= m);
        match *self {
            PotentialSpec::Mimn => match y {
                Label::Positive => (m_plus > 0).then_some(W_POS),
                Label::Negative => (m_plus == 0).then_some(W_NEG),
            },
            PotentialSpec::Rmimn { rho } => {
                // Smallest count whose fraction reaches rho. The slack keeps
                // exact rational boundaries (rho = 0.3, m = 10) feasible at
                // m_plus = 3 despite rounding in `rho * m`.
                let k_min = ((rho * m as f64 - 1e-9).ceil()).max(1.0) as usize;
                match y {
                    Label::Positive => (m_plus >= k_min).then_some(W_POS),
                    Label::Negative => (m_plus < k_min).then_some(W_NEG),
                }
            }
            PotentialSpec::Gmimn { segments } => {
                let scaled = segments as f64 * m_plus as f64 / m as f64;
                match y {
                    Label::Positive => {
                        if m_plus == 0 {
                            return None;
                        }
                        // Upper-inclusive segments; the slack keeps exact
                        // boundaries (K * m_plus / m integral) in the lower
                        // segment.
                        let s = (scaled - 1e-12).ceil() as usize;
                        Some(s.clamp(1, segments) - 1)
                    }
                    Label::Negative => {
                        if m_plus == m {
                            return None;
                        }
                        // Lower-inclusive segments, mirroring the above.
                        let s = (scaled + 1e-12).floor() as usize + 1;
                        Some(segments + s.clamp(1, segments) - 1)
                    }
                }
            }
        }
    }
}

impl std::fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            PotentialSpec::Mimn => write!(f, "mimn"),
            PotentialSpec::Rmimn { rho } => write!(f, "rmimn:{rho}"),
            PotentialSpec::Gmimn { segments } => write!(f, "gmimn:{segments}"),
        }
    }
}

impl std::str::FromStr for PotentialSpec {
    type Err = Error;

    /// Parse the compact form `mimn`, `rmimn:RHO`, or `gmimn:K`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidPotential(format!("'{s}': {msg}"));
        let mut parts = s.split(':');
        let spec = match parts.next() {
            Some("mimn") => PotentialSpec::Mimn,
            Some("rmimn") => {
                let rho = parts
                    .next()
                    .ok_or_else(|| bad("expected rmimn:RHO"))?
                    .parse::<f64>()
                    .map_err(|_| bad("rho must be a number"))?;
                PotentialSpec::Rmimn { rho }
            }
            Some("gmimn") => {
                let segments = parts
                    .next()
                    .ok_or_else(|| bad("expected gmimn:K"))?
                    .parse::<usize>()
                    .map_err(|_| bad("segment count must be a positive integer"))?;
                PotentialSpec::Gmimn { segments }
            }
            _ => return Err(bad("expected mimn, rmimn:RHO, or gmimn:K")),
        };
        if parts.next().is_some() {
            return Err(bad("trailing components"));
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Clique weight vector paired with a [`PotentialSpec`].
///
/// Layout: `[w_pos, w_neg]` for `Mimn`/`Rmimn`;
/// `[w_1^+, ..., w_K^+, w_1^-, ..., w_K^-]` for `Gmimn`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliqueWeights {
    values: Vec<f64>,
}

impl CliqueWeights {
    pub fn new(spec: &PotentialSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.weight_len() {
            return Err(Error::DimensionMismatch {
                expected: spec.weight_len(),
                got: values.len(),
            });
        }
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(CliqueWeights { values })
    }

    pub fn zeros(spec: &PotentialSpec) -> Self {
        CliqueWeights {
            values: vec![0.0; spec.weight_len()],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Value of the clique potential at one count configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CliqueValue {
    /// Feasible configuration: its potential value and the weight slot it reads.
    Finite { value: f64, weight_index: usize },
    /// Configuration the family forbids.
    Infeasible,
}

impl CliqueValue {
    pub fn is_feasible(&self) -> bool {
        matches!(self, CliqueValue::Finite { .. })
    }

    /// The potential value, or `None` when infeasible.
    pub fn value(&self) -> Option<f64> {
        match *self {
            CliqueValue::Finite { value, .. } => Some(value),
            CliqueValue::Infeasible => None,
        }
    }
}

/// One-hot clique feature: which weight slot a feasible configuration selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CliqueIndicator {
    /// Selected weight slot.
    pub index: usize,
    /// Total number of slots for the family.
    pub len: usize,
}

impl CliqueIndicator {
    /// Inner product with a clique weight vector (a single lookup).
    pub fn dot(&self, weights: &CliqueWeights) -> f64 {
        weights.values()[self.index]
    }
}

fn check_counts(m_plus: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "clique potentials are defined on non-empty bags".into(),
        ));
    }
    if m_plus > m {
        return Err(Error::CountExceedsBag { m_plus, m });
    }
    Ok(())
}

/// Evaluate the clique potential at `(m_plus, m, y)`.
pub fn clique_value(
    spec: &PotentialSpec,
    weights: &CliqueWeights,
    m_plus: usize,
    m: usize,
    y: Label,
) -> Result<CliqueValue> {
    check_counts(m_plus, m)?;
    if weights.len() != spec.weight_len() {
        return Err(Error::DimensionMismatch {
            expected: spec.weight_len(),
            got: weights.len(),
        });
    }
    Ok(match spec.weight_index(m_plus, m, y) {
        Some(weight_index) => CliqueValue::Finite {
            value: weights.values()[weight_index],
            weight_index,
        },
        None => CliqueValue::Infeasible,
    })
}

/// All positive counts that are feasible for `(m, y)`, in increasing order.
///
/// Non-empty for every valid spec: each family keeps at least one count
/// feasible for either bag label.
pub fn feasible_counts(spec: &PotentialSpec, m: usize, y: Label) -> Result<Vec<usize>> {
    check_counts(0, m)?;
    spec.validate()?;
    let counts: Vec<usize> = (0..=m)
        .filter(|&m_plus| spec.weight_index(m_plus, m, y).is_some())
        .collect();
    if counts.is_empty() {
        // Unreachable for validated specs; every family keeps at least one
        // count feasible per bag label.
        return Err(Error::InvalidPotential(format!(
            "no feasible positive-instance count for m={m}, y={}",
            y.to_i32()
        )));
    }
    Ok(counts)
}

/// One-hot clique feature for a feasible configuration.
///
/// Errors with [`Error::InfeasibleClique`] when the family forbids the counts.
pub fn clique_indicator(
    spec: &PotentialSpec,
    m_plus: usize,
    m: usize,
    y: Label,
) -> Result<CliqueIndicator> {
    check_counts(m_plus, m)?;
    spec.validate()?;
    match spec.weight_index(m_plus, m, y) {
        Some(index) => Ok(CliqueIndicator {
            index,
            len: spec.weight_len(),
        }),
        None => Err(Error::InfeasibleClique {
            m_plus,
            m,
            y: y.to_i32(),
        }),
    }
}
