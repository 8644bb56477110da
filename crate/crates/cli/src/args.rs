use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Zone-level explanations for binary spectral classifiers.
#[derive(Debug, Parser)]
#[command(name = "smx", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a two-class synthetic spectral dataset.
    Synth(SynthArgs),
    /// Per-class Kennard-Stone train/test split.
    Split(SplitArgs),
    /// Fit a preprocessing transform on a dataset, or apply a saved one.
    Preprocess(PreprocessArgs),
    /// Fit a reference model (logistic or ridge) on preprocessed data.
    Train(TrainArgs),
    /// Run the explainer and write rankings, graphs, spectra and traces.
    Explain(ExplainArgs),
    /// Compare explanation methods on one or more runs.
    Evaluate(EvaluateArgs),
    /// Back-project a predicate threshold to the spectral axis.
    ThresholdSpectrum(ThresholdArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// JSON generator config; the reference benchmark when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the matching zone config (reference benchmark zones).
    #[arg(long)]
    pub write_zones: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub train_out: PathBuf,
    #[arg(long)]
    pub test_out: PathBuf,
    #[arg(long, default_value_t = 0.7)]
    pub train_fraction: f64,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Method to fit: mean_center, poisson_then_center or savgol_then_center.
    #[arg(long, conflicts_with = "state")]
    pub method: Option<String>,
    #[arg(long, default_value_t = 11)]
    pub window: usize,
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Where to save the fitted state.
    #[arg(long, requires = "method")]
    pub state_out: Option<PathBuf>,
    /// Apply a previously fitted state instead of fitting.
    #[arg(long)]
    pub state: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Preprocessed training CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// logistic or ridge.
    #[arg(long, default_value = "logistic")]
    pub model: String,
    #[arg(long, default_value_t = 1e-2)]
    pub l2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Output JSON weight dump.
    #[arg(long)]
    pub out: PathBuf,
    /// Preprocessed test CSV for reporting accuracy.
    #[arg(long)]
    pub test: Option<PathBuf>,
}

/// Engine overrides shared by `explain` and `evaluate`.
#[derive(Debug, Args, Default, Clone)]
pub struct EngineOverrides {
    /// Comma-separated seed list, e.g. 1,2,3,4.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    #[arg(long)]
    pub bags: Option<usize>,
    #[arg(long)]
    pub bag_fraction: Option<f64>,
    /// Comma-separated quantile levels.
    #[arg(long, value_delimiter = ',')]
    pub quantiles: Option<Vec<f64>>,
    #[arg(long)]
    pub min_support: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    /// Run manifest (JSON). Individual flags override its fields.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Raw training CSV.
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub zones: Option<PathBuf>,
    /// logistic, ridge, or a path to a saved model dump.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub engine: EngineOverrides,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// One manifest per dataset; repeat for a batch.
    #[arg(long, required = true)]
    pub manifest: Vec<PathBuf>,
    /// Methods to compare.
    #[arg(long, value_delimiter = ',', default_value = "smx,pfi")]
    pub methods: Vec<String>,
    /// Report directory.
    #[arg(long)]
    pub output: PathBuf,
    /// Maximum zone depth for faithfulness and agreement curves.
    #[arg(long, default_value_t = 9)]
    pub k_max: usize,
    #[arg(long, default_value_t = 10)]
    pub pfi_repeats: usize,
    /// Runs per method in the stability study.
    #[arg(long, default_value_t = 10)]
    pub stability_runs: usize,
    /// Permutation repeats inside each stability run of PFI.
    #[arg(long, default_value_t = 4)]
    pub stability_pfi_repeats: usize,
    #[arg(long, default_value_t = 0.7)]
    pub rho: f64,
    #[arg(long, default_value_t = 20)]
    pub rbo_depth: usize,
    #[command(flatten)]
    pub engine: EngineOverrides,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Predicate label as printed in the ranking, e.g. "Feature 1 > 3.30".
    #[arg(long, conflicts_with_all = ["zone", "tau"])]
    pub predicate: Option<String>,
    #[arg(long, requires = "tau")]
    pub zone: Option<String>,
    #[arg(long, requires = "zone", allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
