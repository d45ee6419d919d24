//! Command-line front end for the multiple-instance learner: train, predict,
//! evaluate, cross-validate, synthesize data, and self-check.

mod commands;
mod model_file;

use clap::{Parser, Subcommand};

use commands::{
    cmd_cv, cmd_eval, cmd_predict, cmd_selfcheck, cmd_synth, cmd_train, CvArgs, EvalArgs,
    PredictArgs, SelfcheckArgs, SynthArgs, TrainArgs,
};

#[derive(Debug, Parser)]
#[command(
    name = "milnet",
    version,
    about = "Multiple-instance learning with cardinality-based bag potentials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a model on MIL-CSV data and save it as JSON.
    Train(TrainArgs),
    /// Predict bag labels with a saved model.
    Predict(PredictArgs),
    /// Evaluate a saved model on labeled data.
    Eval(EvalArgs),
    /// Cross-validate one configuration or a grid of them.
    Cv(CvArgs),
    /// Generate a synthetic MIL-CSV dataset.
    Synth(SynthArgs),
    /// Compare fast inference and the analytic subgradient against oracles.
    Selfcheck(SelfcheckArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Cv(args) => cmd_cv(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Selfcheck(args) => cmd_selfcheck(args),
    };
    if let Err(error) = result {
        if let Some(message) = error.message() {
            eprintln!("error: {message}");
        }
        std::process::exit(error.exit_code());
    }
}
