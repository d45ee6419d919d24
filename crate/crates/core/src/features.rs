//! Feature scaling and explicit kernel feature maps.
//!
//! The pipeline scales raw features into `[0,1]` first and applies the map
//! second: additive homogeneous kernels (intersection, chi-squared,
//! Jensen-Shannon) are defined on nonnegative inputs, and the scaler
//! guarantees that. Quadratic and homogeneous maps turn those kernels into
//! explicit finite embeddings so the rest of the engine can stay linear.
//!
//! The homogeneous maps follow the sampled-spectrum construction: each
//! scalar feature becomes `2n+1` coordinates built from the kernel's Fourier
//! spectrum sampled with period `L`, and the inner product of two mapped
//! vectors approximates the exact kernel value.

use std::fmt;
use std::str::FromStr;

use crate::bag::FeatureVector;
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Per-dimension min-max scaling to the unit interval.
///
/// Fitted on a training set; out-of-range values seen later are clamped so
/// downstream kernel maps keep their nonnegativity precondition. Dimensions
/// that were constant in the fitting data map to `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl Scaler {
    /// Fit per-dimension bounds over every instance of every bag.
    pub fn fit(dataset: &Dataset) -> Scaler {
        let d = dataset.dim();
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for bag in dataset.bags() {
            for inst in bag.instances() {
                for (j, &v) in inst.values().iter().enumerate() {
                    min[j] = min[j].min(v);
                    max[j] = max[j].max(v);
                }
            }
        }
        Scaler { min, max }
    }

    /// Scaler with bounds `[0,1]` in every dimension: values already in the
    /// unit interval pass through unchanged.
    pub fn identity(dim: usize) -> Scaler {
        Scaler {
            min: vec![0.0; dim],
            max: vec![1.0; dim],
        }
    }

    /// Rebuild a scaler from stored bounds.
    pub fn from_bounds(min: Vec<f64>, max: Vec<f64>) -> Result<Scaler> {
        if min.len() != max.len() {
            return Err(Error::DimensionMismatch {
                expected: min.len(),
                got: max.len(),
            });
        }
        if min.is_empty() {
            return Err(Error::InvalidParameter(
                "scaler needs at least one dimension".into(),
            ));
        }
        for j in 0..min.len() {
            if !min[j].is_finite() || !max[j].is_finite() {
                return Err(Error::NonFinite { index: j });
            }
            if min[j] > max[j] {
                return Err(Error::InvalidParameter(format!(
                    "scaler bounds inverted in dimension {j}: min {} > max {}",
                    min[j], max[j]
                )));
            }
        }
        Ok(Scaler { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    /// Map a raw vector into `[0,1]^d`, clamping values outside the fitted
    /// range and sending constant dimensions to `0`.
    pub fn apply(&self, x: &FeatureVector) -> Result<FeatureVector> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        let values = x
            .values()
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let range = self.max[j] - self.min[j];
                if range > 0.0 {
                    ((v - self.min[j]) / range).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect();
        FeatureVector::new(values)
    }
}

/// Additive homogeneous kernel selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `k(x,y) = Σⱼ min(xⱼ, yⱼ)`
    Intersection,
    /// `k(x,y) = Σⱼ 2xⱼyⱼ / (xⱼ + yⱼ)`
    ChiSquared,
    /// `k(x,y) = Σⱼ (xⱼ/2)·log₂((xⱼ+yⱼ)/xⱼ) + (yⱼ/2)·log₂((xⱼ+yⱼ)/yⱼ)`
    JensenShannon,
}

impl KernelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelKind::Intersection => "intersection",
            KernelKind::ChiSquared => "chi2",
            KernelKind::JensenShannon => "js",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<KernelKind> {
        match s {
            "intersection" => Ok(KernelKind::Intersection),
            "chi2" => Ok(KernelKind::ChiSquared),
            "js" => Ok(KernelKind::JensenShannon),
            other => Err(Error::InvalidParameter(format!(
                "unknown kernel '{other}' (expected intersection, chi2, or js)"
            ))),
        }
    }
}

/// How raw (scaled) features are embedded before linear scoring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeatureMapSpec {
    /// Features pass through unchanged.
    Identity,
    /// Degree-2 polynomial embedding whose inner product equals
    /// `⟨x,y⟩ + ⟨x,y⟩²` exactly.
    Quadratic,
    /// Sampled-spectrum embedding of an additive homogeneous kernel with
    /// `2n+1` coordinates per input dimension and sampling period `period`.
    Homogeneous {
        kernel: KernelKind,
        n: usize,
        period: f64,
    },
}

/// Default approximation order for homogeneous maps.
pub const DEFAULT_HOMOGENEOUS_ORDER: usize = 3;
/// Default sampling period for homogeneous maps.
pub const DEFAULT_HOMOGENEOUS_PERIOD: f64 = 0.5;

impl FeatureMapSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FeatureMapSpec::Identity | FeatureMapSpec::Quadratic => Ok(()),
            FeatureMapSpec::Homogeneous { period, .. } => {
                if period.is_finite() && period > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "homogeneous map period must be positive, got {period}"
                    )))
                }
            }
        }
    }

    /// Mapped dimension for a raw dimension `d`.
    pub fn output_dim(&self, d: usize) -> usize {
        match *self {
            FeatureMapSpec::Identity => d,
            FeatureMapSpec::Quadratic => d + d * (d + 1) / 2,
            FeatureMapSpec::Homogeneous { n, .. } => d * (2 * n + 1),
        }
    }

    /// Apply the map to one (already scaled) vector.
    pub fn apply(&self, x: &FeatureVector) -> Result<FeatureVector> {
        match *self {
            FeatureMapSpec::Identity => Ok(x.clone()),
            FeatureMapSpec::Quadratic => quadratic_map(x),
            FeatureMapSpec::Homogeneous { kernel, n, period } => {
                homogeneous_map(kernel, n, period, x)
            }
        }
    }
}

impl fmt::Display for FeatureMapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FeatureMapSpec::Identity => f.write_str("linear"),
            FeatureMapSpec::Quadratic => f.write_str("quadratic"),
            FeatureMapSpec::Homogeneous { kernel, n, period } => {
                write!(f, "hom:{kernel}:{n}:{period}")
            }
        }
    }
}

impl FromStr for FeatureMapSpec {
    type Err = Error;

    /// Parse the compact colon syntax: `linear`, `quadratic`, or
    /// `hom:KERNEL[:N[:PERIOD]]` with defaults `N=3`, `PERIOD=0.5`.
    fn from_str(s: &str) -> Result<FeatureMapSpec> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let parts: Vec<&str> = s.split(':').collect();
        match parts[0] {
            "linear" if parts.len() == 1 => Ok(FeatureMapSpec::Identity),
            "quadratic" if parts.len() == 1 => Ok(FeatureMapSpec::Quadratic),
            "hom" => {
                if parts.len() < 2 || parts.len() > 4 {
                    return bad(format!(
                        "feature map '{s}' must look like hom:KERNEL[:N[:PERIOD]]"
                    ));
                }
                let kernel: KernelKind = parts[1].parse()?;
                let n = if parts.len() > 2 {
                    parts[2].parse().map_err(|_| {
                        Error::InvalidParameter(format!(
                            "homogeneous map order must be a nonnegative integer, got '{}'",
                            parts[2]
                        ))
                    })?
                } else {
                    DEFAULT_HOMOGENEOUS_ORDER
                };
                let period = if parts.len() > 3 {
                    parts[3].parse().map_err(|_| {
                        Error::InvalidParameter(format!(
                            "homogeneous map period must be a number, got '{}'",
                            parts[3]
                        ))
                    })?
                } else {
                    DEFAULT_HOMOGENEOUS_PERIOD
                };
                let spec = FeatureMapSpec::Homogeneous { kernel, n, period };
                spec.validate()?;
                Ok(spec)
            }
            _ => bad(format!(
                "unknown feature map '{s}' (expected linear, quadratic, or hom:KERNEL[:N[:PERIOD]])"
            )),
        }
    }
}

/// Degree-2 polynomial embedding `[x; xⱼ²; √2·xⱼxₖ for j<k]`.
///
/// Satisfies `⟨Φ(x), Φ(y)⟩ = ⟨x,y⟩ + ⟨x,y⟩²` exactly (up to rounding).
pub fn quadratic_map(x: &FeatureVector) -> Result<FeatureVector> {
    let v = x.values();
    let d = v.len();
    let mut out = Vec::with_capacity(d + d * (d + 1) / 2);
    out.extend_from_slice(v);
    for value in v {
        out.push(value * value);
    }
    for j in 0..d {
        for k in (j + 1)..d {
            out.push(std::f64::consts::SQRT_2 * v[j] * v[k]);
        }
    }
    FeatureVector::new(out)
}

fn require_nonnegative(x: &FeatureVector) -> Result<()> {
    for (j, &v) in x.values().iter().enumerate() {
        if v < 0.0 {
            return Err(Error::NegativeKernelInput { index: j });
        }
    }
    Ok(())
}

fn js_half(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        0.5 * a * ((a + b) / a).log2()
    }
}

/// Closed-form kernel value; the oracle that the homogeneous maps are
/// measured against. Inputs must be nonnegative componentwise; terms with a
/// zero denominator or argument contribute `0` (the continuous extension).
pub fn exact_kernel(kernel: KernelKind, x: &FeatureVector, y: &FeatureVector) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    require_nonnegative(x)?;
    require_nonnegative(y)?;
    let mut total = 0.0;
    for (&a, &b) in x.values().iter().zip(y.values()) {
        total += match kernel {
            KernelKind::Intersection => a.min(b),
            KernelKind::ChiSquared => {
                let s = a + b;
                if s == 0.0 {
                    0.0
                } else {
                    2.0 * a * b / s
                }
            }
            KernelKind::JensenShannon => js_half(a, b) + js_half(b, a),
        };
    }
    Ok(total)
}

/// Fourier spectrum density of the kernel signature, the function whose
/// samples at `0, L, 2L, ...` weight the map coordinates. Each integrates
/// to `k(1,1) = 1`.
fn spectrum(kernel: KernelKind, omega: f64) -> f64 {
    fn sech(t: f64) -> f64 {
        2.0 / (t.exp() + (-t).exp())
    }
    use std::f64::consts::{FRAC_2_PI, LN_2, PI};
    match kernel {
        KernelKind::Intersection => FRAC_2_PI / (1.0 + 4.0 * omega * omega),
        KernelKind::ChiSquared => sech(PI * omega),
        KernelKind::JensenShannon => sech(PI * omega) / (LN_2 * (1.0 + 4.0 * omega * omega)),
    }
}

/// Sampled-spectrum embedding of one vector: each scalar `x` becomes
///
/// ```text
/// [ √(L·κ(0)·x),
///   √(2L·κ(jL)·x)·cos(jL·ln x), √(2L·κ(jL)·x)·sin(jL·ln x) ]  for j = 1..n
/// ```
///
/// concatenated across input dimensions (`κ` is the kernel spectrum). A zero
/// scalar maps to zeros, matching the `√x` decay of every coordinate.
pub fn homogeneous_map(
    kernel: KernelKind,
    n: usize,
    period: f64,
    x: &FeatureVector,
) -> Result<FeatureVector> {
    let spec = FeatureMapSpec::Homogeneous { kernel, n, period };
    spec.validate()?;
    require_nonnegative(x)?;

    // Spectrum samples are shared by every input dimension.
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(period * spectrum(kernel, 0.0));
    for j in 1..=n {
        coeffs.push(2.0 * period * spectrum(kernel, j as f64 * period));
    }

    let mut out = Vec::with_capacity(x.dim() * (2 * n + 1));
    for &v in x.values() {
        if v == 0.0 {
            out.extend(std::iter::repeat_n(0.0, 2 * n + 1));
            continue;
        }
        let log_v = v.ln();
        out.push((coeffs[0] * v).sqrt());
        for (j, &coeff) in coeffs.iter().enumerate().skip(1) {
            let amp = (coeff * v).sqrt();
            let phase = j as f64 * period * log_v;
            out.push(amp * phase.cos());
            out.push(amp * phase.sin());
        }
    }
    FeatureVector::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bag::{Bag, Label};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fv(values: &[f64]) -> FeatureVector {
        FeatureVector::new(values.to_vec()).unwrap()
    }

    fn dot(a: &FeatureVector, b: &FeatureVector) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| x * y)
            .sum()
    }

    fn toy_dataset() -> Dataset {
        let bags = vec![
            Bag::new(
                "a",
                Label::Positive,
                vec![fv(&[0.0, 10.0, 5.0]), fv(&[4.0, 30.0, 5.0])],
            )
            .unwrap(),
            Bag::new("b", Label::Negative, vec![fv(&[2.0, 20.0, 5.0])]).unwrap(),
        ];
        Dataset::new(bags).unwrap()
    }

    #[test]
    fn scaler_maps_fitting_data_into_unit_interval() {
        let ds = toy_dataset();
        let scaler = Scaler::fit(&ds);
        assert_eq!(scaler.min(), &[0.0, 10.0, 5.0]);
        assert_eq!(scaler.max(), &[4.0, 30.0, 5.0]);
        let scaled = scaler.apply(&fv(&[2.0, 20.0, 5.0])).unwrap();
        assert_eq!(scaled.values(), &[0.5, 0.5, 0.0]); // constant dim -> 0
        assert_eq!(
            scaler.apply(&fv(&[0.0, 10.0, 5.0])).unwrap().values(),
            &[0.0, 0.0, 0.0]
        );
        assert_eq!(
            scaler.apply(&fv(&[4.0, 30.0, 5.0])).unwrap().values(),
            &[1.0, 1.0, 0.0]
        );
    }

    #[test]
    fn scaler_clamps_out_of_range_values() {
        let scaler = Scaler::fit(&toy_dataset());
        let scaled = scaler.apply(&fv(&[-3.0, 99.0, 7.0])).unwrap();
        assert_eq!(scaled.values(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn scaler_bounds_round_trip_and_validate() {
        let scaler = Scaler::fit(&toy_dataset());
        let rebuilt = Scaler::from_bounds(scaler.min().to_vec(), scaler.max().to_vec()).unwrap();
        assert_eq!(scaler, rebuilt);
        assert!(Scaler::from_bounds(vec![0.0], vec![1.0, 2.0]).is_err());
        assert!(Scaler::from_bounds(vec![2.0], vec![1.0]).is_err());
        assert!(Scaler::from_bounds(vec![f64::NAN], vec![1.0]).is_err());
        assert!(Scaler::from_bounds(vec![], vec![]).is_err());
        let identity = Scaler::identity(2);
        assert_eq!(identity.apply(&fv(&[0.25, 1.0])).unwrap().values(), &[0.25, 1.0]);
    }

    #[test]
    fn quadratic_map_frozen_example() {
        let phi = quadratic_map(&fv(&[1.0, 0.0])).unwrap();
        assert_eq!(phi.values(), &[1.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(dot(&phi, &phi), 2.0); // <x,x> + <x,x>^2 = 1 + 1
    }

    #[test]
    fn quadratic_map_inner_product_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let d = rng.random_range(1..=6);
            let x = fv(&(0..d).map(|_| rng.random_range(0.0..1.0)).collect::<Vec<_>>());
            let y = fv(&(0..d).map(|_| rng.random_range(0.0..1.0)).collect::<Vec<_>>());
            let u: f64 = dot(&x, &y);
            let exact = u + u * u;
            let approx = dot(&quadratic_map(&x).unwrap(), &quadratic_map(&y).unwrap());
            let rel = (approx - exact).abs() / exact.abs().max(1e-12);
            assert!(rel <= 1e-12, "rel err {rel} for u={u}");
        }
    }

    #[test]
    fn exact_kernel_frozen_values() {
        let x = fv(&[0.2, 0.7]);
        let y = fv(&[0.5, 0.1]);
        assert_eq!(
            exact_kernel(KernelKind::Intersection, &x, &y).unwrap(),
            0.2 + 0.1
        );
        let chi = exact_kernel(KernelKind::ChiSquared, &fv(&[0.2]), &fv(&[0.6])).unwrap();
        assert!((chi - 0.3).abs() < 1e-15, "{chi}");
        let js = exact_kernel(KernelKind::JensenShannon, &fv(&[0.25]), &fv(&[0.75])).unwrap();
        assert!((js - 0.4056390622295664).abs() < 1e-15, "{js}");
    }

    #[test]
    fn exact_kernel_diagonal_equals_ell1_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for kernel in [
            KernelKind::Intersection,
            KernelKind::ChiSquared,
            KernelKind::JensenShannon,
        ] {
            for _ in 0..50 {
                let x = fv(&(0..4).map(|_| rng.random_range(0.0..1.0)).collect::<Vec<_>>());
                let sum: f64 = x.values().iter().sum();
                let k = exact_kernel(kernel, &x, &x).unwrap();
                assert!((k - sum).abs() <= 1e-12 * sum.max(1.0), "{kernel}: {k} vs {sum}");
            }
        }
    }

    #[test]
    fn exact_kernel_zero_terms_contribute_zero() {
        for kernel in [
            KernelKind::Intersection,
            KernelKind::ChiSquared,
            KernelKind::JensenShannon,
        ] {
            assert_eq!(exact_kernel(kernel, &fv(&[0.0]), &fv(&[0.8])).unwrap(), 0.0);
            assert_eq!(exact_kernel(kernel, &fv(&[0.0]), &fv(&[0.0])).unwrap(), 0.0);
        }
    }

    #[test]
    fn exact_kernel_is_bitwise_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for kernel in [
            KernelKind::Intersection,
            KernelKind::ChiSquared,
            KernelKind::JensenShannon,
        ] {
            for _ in 0..50 {
                let x = fv(&(0..8).map(|_| rng.random_range(0.0..1.0)).collect::<Vec<_>>());
                let y = fv(&(0..8).map(|_| rng.random_range(0.0..1.0)).collect::<Vec<_>>());
                let ab = exact_kernel(kernel, &x, &y).unwrap();
                let ba = exact_kernel(kernel, &y, &x).unwrap();
                assert_eq!(ab.to_bits(), ba.to_bits());
            }
        }
    }

    #[test]
    fn exact_kernel_rejects_negative_and_mismatched_inputs() {
        let r = exact_kernel(KernelKind::ChiSquared, &fv(&[0.5, -0.1]), &fv(&[0.5, 0.5]));
        assert!(matches!(r, Err(Error::NegativeKernelInput { index: 1 })));
        let r = exact_kernel(KernelKind::ChiSquared, &fv(&[0.5]), &fv(&[0.5, 0.5]));
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn homogeneous_map_of_zero_is_zero() {
        let phi = homogeneous_map(KernelKind::ChiSquared, 3, 0.5, &fv(&[0.0, 0.5])).unwrap();
        assert_eq!(phi.dim(), 14);
        assert!(phi.values()[..7].iter().all(|&v| v == 0.0));
        assert!(phi.values()[7..].iter().any(|&v| v != 0.0));
    }

    #[test]
    fn homogeneous_map_concatenates_per_dimension_blocks() {
        let joint = homogeneous_map(KernelKind::JensenShannon, 2, 0.7, &fv(&[0.3, 0.9])).unwrap();
        let a = homogeneous_map(KernelKind::JensenShannon, 2, 0.7, &fv(&[0.3])).unwrap();
        let b = homogeneous_map(KernelKind::JensenShannon, 2, 0.7, &fv(&[0.9])).unwrap();
        let expect: Vec<f64> = a.values().iter().chain(b.values()).copied().collect();
        assert_eq!(joint.values(), &expect[..]);
    }

    #[test]
    fn homogeneous_map_diagonal_close_at_default_parameters() {
        // chi-squared spectrum decays exponentially, so n=3, L=0.5 is already
        // within a fraction of a percent on the diagonal.
        let phi = homogeneous_map(KernelKind::ChiSquared, 3, 0.5, &fv(&[0.5])).unwrap();
        let approx = dot(&phi, &phi);
        assert!((approx - 0.5).abs() < 5e-3, "approx {approx}");
    }

    #[test]
    fn homogeneous_map_converges_to_exact_kernel() {
        // With a wide sampled band the map must reproduce the closed forms;
        // this pins both the spectrum formulas and the map construction.
        // The intersection spectrum has polynomial tails, so it needs a much
        // wider band for the same accuracy.
        let pairs = [(0.9, 0.9), (0.3, 0.7), (0.05, 1.0), (1.0, 0.02)];
        let cases = [
            (KernelKind::ChiSquared, 80, 0.1, 1e-8),
            (KernelKind::JensenShannon, 80, 0.1, 1e-8),
            (KernelKind::Intersection, 500, 0.1, 2e-2),
        ];
        for (kernel, n, period, tol) in cases {
            for (a, b) in pairs {
                let x = fv(&[a]);
                let y = fv(&[b]);
                let exact = exact_kernel(kernel, &x, &y).unwrap();
                let approx = dot(
                    &homogeneous_map(kernel, n, period, &x).unwrap(),
                    &homogeneous_map(kernel, n, period, &y).unwrap(),
                );
                let rel = (approx - exact).abs() / exact.abs();
                assert!(rel <= tol, "{kernel} ({a},{b}): rel err {rel}");
            }
        }
    }

    #[test]
    fn homogeneous_map_rejects_negative_input_and_bad_period() {
        assert!(matches!(
            homogeneous_map(KernelKind::ChiSquared, 3, 0.5, &fv(&[-0.5])),
            Err(Error::NegativeKernelInput { index: 0 })
        ));
        assert!(homogeneous_map(KernelKind::ChiSquared, 3, 0.0, &fv(&[0.5])).is_err());
        assert!(homogeneous_map(KernelKind::ChiSquared, 3, -1.0, &fv(&[0.5])).is_err());
    }

    #[test]
    fn map_spec_output_dims_and_apply_dispatch() {
        let x = fv(&[0.2, 0.8, 0.4]);
        assert_eq!(FeatureMapSpec::Identity.output_dim(3), 3);
        assert_eq!(FeatureMapSpec::Quadratic.output_dim(3), 9);
        let hom = FeatureMapSpec::Homogeneous {
            kernel: KernelKind::Intersection,
            n: 3,
            period: 0.5,
        };
        assert_eq!(hom.output_dim(3), 21);
        for spec in [FeatureMapSpec::Identity, FeatureMapSpec::Quadratic, hom] {
            let mapped = spec.apply(&x).unwrap();
            assert_eq!(mapped.dim(), spec.output_dim(3));
        }
        assert_eq!(FeatureMapSpec::Identity.apply(&x).unwrap(), x);
    }

    #[test]
    fn map_spec_parse_and_display_round_trip() {
        for s in ["linear", "quadratic", "hom:chi2:3:0.5", "hom:js:5:0.25"] {
            let spec: FeatureMapSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert_eq!(
            "hom:intersection".parse::<FeatureMapSpec>().unwrap(),
            FeatureMapSpec::Homogeneous {
                kernel: KernelKind::Intersection,
                n: 3,
                period: 0.5
            }
        );
        assert_eq!(
            "hom:chi2:7".parse::<FeatureMapSpec>().unwrap(),
            FeatureMapSpec::Homogeneous {
                kernel: KernelKind::ChiSquared,
                n: 7,
                period: 0.5
            }
        );
        for bad in [
            "", "poly", "hom", "hom:rbf", "quadratic:2", "linear:1", "hom:chi2:x",
            "hom:chi2:3:0", "hom:chi2:3:-1", "hom:chi2:3:nan", "hom:chi2:3:0.5:9",
        ] {
            assert!(bad.parse::<FeatureMapSpec>().is_err(), "accepted '{bad}'");
        }
    }
}
