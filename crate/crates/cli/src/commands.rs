//! The six subcommands and their shared error-to-exit-code mapping.
//!
//! Logs go to standard error; data products go to files or standard output.
//! Every command is deterministic given its flags and input files.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;

use milnet::data::{parse_mil_csv, synthesize, write_mil_csv, Dataset, SynthParams};
use milnet::eval::{cross_validate, evaluate, format_grid_table, grid_search, Metrics};
use milnet::features::FeatureMapSpec;
use milnet::inference::predict;
use milnet::learning::{train, TrainConfig};
use milnet::model::Model;
use milnet::potential::PotentialSpec;
use milnet::selfcheck::{gradient_cases, map_equivalence_cases};

use crate::model_file::ModelFile;

/// Command failure carrying its process exit code.
///
/// `Usage` exits 2 (matching the argument parser's own exit code for
/// malformed invocations), `Data` exits 3, `Train` exits 4, and `Check`
/// exits 1 after the failing cases were already printed.
#[derive(Debug)]
pub enum CmdError {
    Usage(String),
    Data(String),
    Train(String),
    Check,
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Check => 1,
            CmdError::Usage(_) => 2,
            CmdError::Data(_) => 3,
            CmdError::Train(_) => 4,
        }
    }

    pub fn message(&self) -> Option<&str> {
        match self {
            CmdError::Check => None,
            CmdError::Usage(m) | CmdError::Data(m) | CmdError::Train(m) => Some(m),
        }
    }
}

fn usage_err(e: impl Display) -> CmdError {
    CmdError::Usage(e.to_string())
}

fn data_err(e: impl Display) -> CmdError {
    CmdError::Data(e.to_string())
}

fn train_err(e: impl Display) -> CmdError {
    CmdError::Train(e.to_string())
}

fn parse_potential(text: &str) -> Result<PotentialSpec, CmdError> {
    text.parse().map_err(usage_err)
}

fn parse_map(text: &str) -> Result<FeatureMapSpec, CmdError> {
    text.parse().map_err(usage_err)
}

fn load_dataset(path: &Path) -> Result<Dataset, CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CmdError::Data(format!("{}: {e}", path.display())))?;
    parse_mil_csv(&text).map_err(|e| CmdError::Data(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<Model, CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CmdError::Data(format!("{}: {e}", path.display())))?;
    let file = ModelFile::from_json(&text)
        .map_err(|e| CmdError::Data(format!("{}: {e}", path.display())))?;
    file.to_model().map_err(data_err)
}

fn write_product(path: Option<&Path>, content: &str) -> Result<(), CmdError> {
    match path {
        Some(path) => fs::write(path, content)
            .map_err(|e| CmdError::Data(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Shared optimizer flags.
#[derive(Debug, Args)]
pub struct OptimizerArgs {
    /// Regularization strength.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Maximum subgradient iterations.
    #[arg(long, default_value_t = 300)]
    pub iters: usize,
    /// Initial step size (decays as step0 / (1 + t / step_decay)).
    #[arg(long, default_value_t = 1.0)]
    pub step0: f64,
    /// Step decay time constant.
    #[arg(long, default_value_t = 50.0)]
    pub step_decay: f64,
    /// Relative-improvement threshold of the early-stopping window.
    #[arg(long, default_value_t = 1e-6)]
    pub stop_tol: f64,
    /// Append a constant 1.0 feature after scaling and mapping.
    #[arg(long)]
    pub bias: bool,
    /// Seed recorded in the configuration (training itself is deterministic).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl OptimizerArgs {
    fn to_config(&self) -> Result<TrainConfig, CmdError> {
        let config = TrainConfig {
            lambda: self.lambda,
            max_iters: self.iters,
            step0: self.step0,
            step_decay: self.step_decay,
            seed: self.seed,
            stop_tol: self.stop_tol,
            append_bias: self.bias,
        };
        config.validate().map_err(usage_err)?;
        Ok(config)
    }
}

/// Train a model and write it as JSON.
#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training data in MIL-CSV form (bag_id,label,f1..fd).
    #[arg(long)]
    pub data: PathBuf,
    /// Positive-bag rule: mimn, rmimn:RHO, or gmimn:K.
    #[arg(long, default_value = "mimn")]
    pub potential: String,
    /// Feature map: linear, quadratic, or hom:KERNEL[:N[:PERIOD]].
    #[arg(long, default_value = "linear")]
    pub map: String,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Output model file.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_train(args: &TrainArgs) -> Result<(), CmdError> {
    let spec = parse_potential(&args.potential)?;
    let map_spec = parse_map(&args.map)?;
    let config = args.optimizer.to_config()?;
    let dataset = load_dataset(&args.data)?;
    let outcome = train(&dataset, spec, map_spec, &config).map_err(train_err)?;
    for (i, obj) in outcome.objectives.iter().enumerate() {
        eprintln!("iter {i} objective {obj}");
    }
    eprintln!(
        "best iteration {} objective {}",
        outcome.best_iteration, outcome.objectives[outcome.best_iteration]
    );
    let json = ModelFile::from_model(&outcome.model).to_json();
    fs::write(&args.out, json)
        .map_err(|e| CmdError::Data(format!("{}: {e}", args.out.display())))?;
    eprintln!("model written to {}", args.out.display());
    Ok(())
}

/// Predict bag labels with a saved model.
#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// Data in MIL-CSV form.
    #[arg(long)]
    pub data: PathBuf,
    /// Output CSV (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_predict(args: &PredictArgs) -> Result<(), CmdError> {
    let model = load_model(&args.model)?;
    let dataset = load_dataset(&args.data)?;
    let mapped = model.map_dataset(&dataset).map_err(data_err)?;
    let mut out = String::from("bag_id,predicted,margin,k_star\n");
    for bag in mapped.bags() {
        let p = predict(&model, bag).map_err(data_err)?;
        out.push_str(&format!(
            "{},{},{},{}\n",
            bag.id(),
            p.label.to_i32(),
            p.margin,
            p.labeling.positive_count()
        ));
    }
    write_product(args.out.as_deref(), &out)
}

/// Evaluate a saved model on labeled data.
#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model file written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// Labeled data in MIL-CSV form.
    #[arg(long)]
    pub data: PathBuf,
}

fn print_metrics(metrics: &Metrics) {
    println!(
        "accuracy {} ({}/{} bags)",
        metrics.accuracy,
        metrics.correct(),
        metrics.total()
    );
    println!(
        "confusion tn {} fp {} fn {} tp {}",
        metrics.confusion[0][0],
        metrics.confusion[0][1],
        metrics.confusion[1][0],
        metrics.confusion[1][1]
    );
}

pub fn cmd_eval(args: &EvalArgs) -> Result<(), CmdError> {
    let model = load_model(&args.model)?;
    let dataset = load_dataset(&args.data)?;
    let metrics = evaluate(&model, &dataset).map_err(data_err)?;
    print_metrics(&metrics);
    Ok(())
}

/// Cross-validate one configuration or a grid of them.
#[derive(Debug, Args)]
pub struct CvArgs {
    /// Labeled data in MIL-CSV form.
    #[arg(long)]
    pub data: PathBuf,
    /// Positive-bag rule when no grid flag is given.
    #[arg(long, default_value = "mimn")]
    pub potential: String,
    /// Feature map: linear, quadratic, or hom:KERNEL[:N[:PERIOD]].
    #[arg(long, default_value = "linear")]
    pub map: String,
    /// Number of folds (at least 2).
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Comma-separated rho values; searches the rmimn family.
    #[arg(long)]
    pub rho_grid: Option<String>,
    /// Comma-separated segment counts; searches the gmimn family.
    #[arg(long)]
    pub k_grid: Option<String>,
    /// Comma-separated regularization strengths to search.
    #[arg(long)]
    pub lambda_grid: Option<String>,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

fn parse_list<T: std::str::FromStr>(text: &str, flag: &str) -> Result<Vec<T>, CmdError> {
    let mut values = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        values.push(part.parse::<T>().map_err(|_| {
            CmdError::Usage(format!("{flag}: cannot parse '{part}'"))
        })?);
    }
    if values.is_empty() {
        return Err(CmdError::Usage(format!("{flag}: empty list")));
    }
    Ok(values)
}

fn cv_specs(args: &CvArgs) -> Result<Vec<PotentialSpec>, CmdError> {
    let mut specs = Vec::new();
    if let Some(text) = &args.rho_grid {
        for rho in parse_list::<f64>(text, "--rho-grid")? {
            specs.push(PotentialSpec::Rmimn { rho });
        }
    }
    if let Some(text) = &args.k_grid {
        for segments in parse_list::<usize>(text, "--k-grid")? {
            specs.push(PotentialSpec::Gmimn { segments });
        }
    }
    if specs.is_empty() {
        specs.push(parse_potential(&args.potential)?);
    }
    for spec in &specs {
        spec.validate().map_err(usage_err)?;
    }
    Ok(specs)
}

pub fn cmd_cv(args: &CvArgs) -> Result<(), CmdError> {
    if args.folds < 2 {
        return Err(CmdError::Usage(format!(
            "--folds must be at least 2, got {}",
            args.folds
        )));
    }
    let map_spec = parse_map(&args.map)?;
    let config = args.optimizer.to_config()?;
    let specs = cv_specs(args)?;
    let lambdas = match &args.lambda_grid {
        Some(text) => {
            let values = parse_list::<f64>(text, "--lambda-grid")?;
            for &lambda in &values {
                if !(lambda.is_finite() && lambda > 0.0) {
                    return Err(CmdError::Usage(format!(
                        "--lambda-grid: lambda must be positive, got {lambda}"
                    )));
                }
            }
            values
        }
        None => vec![config.lambda],
    };
    let dataset = load_dataset(&args.data)?;

    if specs.len() == 1 && lambdas.len() == 1 {
        let cv = cross_validate(
            &dataset,
            specs[0],
            map_spec,
            &TrainConfig { lambda: lambdas[0], ..config },
            args.folds,
            args.optimizer.seed,
        )
        .map_err(train_err)?;
        for (i, fold) in cv.folds.iter().enumerate() {
            println!("fold {i} accuracy {}", fold.accuracy);
        }
        println!("mean accuracy {}", cv.mean_accuracy);
    } else {
        let result = grid_search(
            &dataset,
            &specs,
            &lambdas,
            map_spec,
            &config,
            args.folds,
            args.optimizer.seed,
        )
        .map_err(train_err)?;
        print!("{}", format_grid_table(&result));
    }
    Ok(())
}

/// Generate a synthetic MIL-CSV dataset.
#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Bag counts as POSITIVE,NEGATIVE.
    #[arg(long)]
    pub bags: String,
    /// Instances per bag.
    #[arg(long, default_value_t = 10)]
    pub bag_size: usize,
    /// Fraction of concept instances in each positive bag, in (0,1].
    #[arg(long)]
    pub witness: f64,
    /// Feature dimensionality.
    #[arg(long, default_value_t = 20)]
    pub dim: usize,
    /// Distance between the concept and background class means.
    #[arg(long, default_value_t = 4.0)]
    pub sep: f64,
    /// Fraction of concept instances leaked into negative bags, in [0,1).
    #[arg(long, default_value_t = 0.0)]
    pub contam: f64,
    /// Per-coordinate Gaussian noise level.
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), CmdError> {
    let (pos, neg) = args
        .bags
        .split_once(',')
        .ok_or_else(|| CmdError::Usage("--bags expects POSITIVE,NEGATIVE".into()))?;
    let positive_bags = pos
        .trim()
        .parse::<usize>()
        .map_err(|_| CmdError::Usage(format!("--bags: cannot parse '{pos}'")))?;
    let negative_bags = neg
        .trim()
        .parse::<usize>()
        .map_err(|_| CmdError::Usage(format!("--bags: cannot parse '{neg}'")))?;
    let params = SynthParams {
        positive_bags,
        negative_bags,
        bag_size: args.bag_size,
        dim: args.dim,
        witness_rate: args.witness,
        contamination: args.contam,
        separation: args.sep,
        noise_sd: args.noise,
    };
    params.validate().map_err(usage_err)?;
    let dataset = synthesize(&params, args.seed).map_err(usage_err)?;
    eprintln!(
        "generated {} bags ({} positive, {} negative), {} witnesses per positive bag",
        dataset.len(),
        positive_bags,
        negative_bags,
        params.witnesses_per_positive_bag()
    );
    write_product(args.out.as_deref(), &write_mil_csv(&dataset))
}

/// Run the seeded oracle and gradient suites.
#[derive(Debug, Args)]
pub struct SelfcheckArgs {
    /// Number of inference cases to compare against the brute-force oracle.
    #[arg(long, default_value_t = 1000)]
    pub cases: usize,
    /// Largest bag size generated (at most 20).
    #[arg(long, default_value_t = 12)]
    pub max_bag: usize,
    /// Base seed; case i uses seed + i.
    #[arg(long, default_value_t = 3)]
    pub seed: u64,
    /// Number of finite-difference gradient points.
    #[arg(long, default_value_t = 100)]
    pub grad_points: usize,
}

pub fn cmd_selfcheck(args: &SelfcheckArgs) -> Result<(), CmdError> {
    let inference = map_equivalence_cases(args.cases, args.max_bag, args.seed)
        .map_err(usage_err)?;
    let gradient = gradient_cases(args.grad_points, args.seed).map_err(usage_err)?;
    for failure in inference.failures.iter().chain(&gradient.failures) {
        eprintln!(
            "case {} failed (replay with --seed {} --cases 1): {}",
            failure.case, failure.seed, failure.message
        );
    }
    println!(
        "{}/{} inference, {}/{} gradient",
        inference.passed, inference.total, gradient.passed, gradient.total
    );
    if inference.ok() && gradient.ok() {
        Ok(())
    } else {
        Err(CmdError::Check)
    }
}
