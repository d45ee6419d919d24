//! JSON model persistence.
//!
//! The document layout is versioned and strict: unknown keys are rejected,
//! and loading revalidates every invariant through [`Model::new`]. Numbers
//! are written in shortest round-trip form, so a load/save cycle reproduces
//! the same bytes and a loaded model predicts bit-for-bit like the saved one.

use serde::{Deserialize, Serialize};

use milnet::error::{Error, Result};
use milnet::features::{FeatureMapSpec, KernelKind, Scaler};
use milnet::model::Model;
use milnet::potential::{CliqueWeights, PotentialSpec};

pub const MODEL_FILE_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialFile {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_segments: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureMapFile {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalerFile {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub version: u32,
    pub potential: PotentialFile,
    pub feature_map: FeatureMapFile,
    pub scaler: ScalerFile,
    pub w_instance: Vec<f64>,
    pub w_clique: Vec<f64>,
    pub append_bias: bool,
}

fn potential_to_file(spec: &PotentialSpec) -> PotentialFile {
    match *spec {
        PotentialSpec::Mimn => PotentialFile {
            kind: "mimn".into(),
            rho: None,
            k_segments: None,
        },
        PotentialSpec::Rmimn { rho } => PotentialFile {
            kind: "rmimn".into(),
            rho: Some(rho),
            k_segments: None,
        },
        PotentialSpec::Gmimn { segments } => PotentialFile {
            kind: "gmimn".into(),
            rho: None,
            k_segments: Some(segments),
        },
    }
}

fn potential_from_file(file: &PotentialFile) -> Result<PotentialSpec> {
    let invalid = |msg: String| Error::InvalidModel(msg);
    let spec = match file.kind.as_str() {
        "mimn" => {
            if file.rho.is_some() || file.k_segments.is_some() {
                return Err(invalid("mimn potential takes no parameters".into()));
            }
            PotentialSpec::Mimn
        }
        "rmimn" => {
            if file.k_segments.is_some() {
                return Err(invalid("rmimn potential does not take k_segments".into()));
            }
            let rho = file
                .rho
                .ok_or_else(|| invalid("rmimn potential requires rho".into()))?;
            PotentialSpec::Rmimn { rho }
        }
        "gmimn" => {
            if file.rho.is_some() {
                return Err(invalid("gmimn potential does not take rho".into()));
            }
            let segments = file
                .k_segments
                .ok_or_else(|| invalid("gmimn potential requires k_segments".into()))?;
            PotentialSpec::Gmimn { segments }
        }
        other => {
            return Err(invalid(format!("unsupported potential kind '{other}'")));
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn feature_map_to_file(spec: &FeatureMapSpec) -> FeatureMapFile {
    match *spec {
        FeatureMapSpec::Identity => FeatureMapFile {
            kind: "linear".into(),
            n: None,
            period: None,
        },
        FeatureMapSpec::Quadratic => FeatureMapFile {
            kind: "quadratic".into(),
            n: None,
            period: None,
        },
        FeatureMapSpec::Homogeneous { kernel, n, period } => FeatureMapFile {
            kind: kernel.as_str().into(),
            n: Some(n),
            period: Some(period),
        },
    }
}

fn feature_map_from_file(file: &FeatureMapFile) -> Result<FeatureMapSpec> {
    let invalid = |msg: String| Error::InvalidModel(msg);
    let plain = |spec| {
        if file.n.is_some() || file.period.is_some() {
            Err(invalid(format!(
                "feature_map kind '{}' takes no parameters",
                file.kind
            )))
        } else {
            Ok(spec)
        }
    };
    let spec = match file.kind.as_str() {
        "linear" => plain(FeatureMapSpec::Identity)?,
        "quadratic" => plain(FeatureMapSpec::Quadratic)?,
        kernel_name => {
            let kernel: KernelKind = kernel_name
                .parse()
                .map_err(|_| invalid(format!("unsupported feature_map kind '{kernel_name}'")))?;
            FeatureMapSpec::Homogeneous {
                kernel,
                n: file
                    .n
                    .ok_or_else(|| invalid("homogeneous feature_map requires n".into()))?,
                period: file
                    .period
                    .ok_or_else(|| invalid("homogeneous feature_map requires period".into()))?,
            }
        }
    };
    spec.validate()?;
    Ok(spec)
}

impl ModelFile {
    pub fn from_model(model: &Model) -> ModelFile {
        ModelFile {
            version: MODEL_FILE_VERSION,
            potential: potential_to_file(model.spec()),
            feature_map: feature_map_to_file(model.map_spec()),
            scaler: ScalerFile {
                min: model.scaler().min().to_vec(),
                max: model.scaler().max().to_vec(),
            },
            w_instance: model.w_instance().to_vec(),
            w_clique: model.clique().values().to_vec(),
            append_bias: model.append_bias(),
        }
    }

    pub fn to_model(&self) -> Result<Model> {
        if self.version != MODEL_FILE_VERSION {
            return Err(Error::InvalidModel(format!(
                "unsupported model file version {}, expected {MODEL_FILE_VERSION}",
                self.version
            )));
        }
        let spec = potential_from_file(&self.potential)?;
        let map_spec = feature_map_from_file(&self.feature_map)?;
        let scaler = Scaler::from_bounds(self.scaler.min.clone(), self.scaler.max.clone())?;
        let clique = CliqueWeights::new(&spec, self.w_clique.clone())?;
        Model::new(
            self.w_instance.clone(),
            clique,
            spec,
            map_spec,
            scaler,
            self.append_bias,
        )
    }

    /// Canonical serialized form: pretty-printed, fixed key order, trailing
    /// newline. Reruns with identical inputs produce identical bytes.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("model file serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<ModelFile> {
        serde_json::from_str(text).map_err(|e| Error::InvalidModel(format!("model file: {e}")))
    }
}
