use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use prisel_core::java_stmt::FuncCallPrecedence;
use prisel_core::metrics::{DistributionSource, Grouping, Pairing};
use prisel_core::promptgen::TokenScheme;
use serde::{Deserialize, Serialize};

/// Seed used when neither a flag nor a config file sets one.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "prisel",
    version,
    about = "Privacy-relevant statement toolkit for Java/Android methods"
)]
pub struct Cli {
    /// JSON file whose keys fill any flag not given on the command line
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment every sample into categorized statements (statements.jsonl)
    Extract(ExtractArgs),
    /// Category distributions over statements or annotator selections (distribution.json)
    Analyze(AnalyzeArgs),
    /// Train/validation/test split of annotated samples (split.json)
    Split(SplitArgs),
    /// Training prompts for statement-prediction models (prompts.jsonl)
    Prompts(PromptsArgs),
    /// Fit the category-prior baseline (prior.json)
    TrainBaseline(TrainArgs),
    /// Top-3 predictions from the baseline or an external adapter (predictions.jsonl)
    Predict(PredictArgs),
    /// Overlap between predictions, or between annotators, and the references (report.json)
    Evaluate(EvaluateArgs),
    /// Run the annotation server
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subset {
    Train,
    Val,
    Test,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeChoice {
    On,
    Off,
    Both,
}

impl ModeChoice {
    pub fn modes(self) -> Vec<FuncCallPrecedence> {
        match self {
            Self::On => vec![FuncCallPrecedence::On],
            Self::Off => vec![FuncCallPrecedence::Off],
            Self::Both => vec![FuncCallPrecedence::On, FuncCallPrecedence::Off],
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractArgs {
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Precomputed statements.jsonl; samples are re-extracted when absent
    #[arg(long)]
    pub statements: Option<PathBuf>,
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// statements | ratings (default: both when annotations are given)
    #[arg(long)]
    pub source: Option<DistributionSource>,
    /// all | by_order | by_label (default: every grouping)
    #[arg(long)]
    pub group: Option<Grouping>,
    #[arg(long, value_enum)]
    pub funccall: Option<ModeChoice>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitArgs {
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Validation size (default: 10% of the non-test samples)
    #[arg(long)]
    pub val_count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct PromptsArgs {
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[arg(long)]
    pub statements: Option<PathBuf>,
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub subset: Option<Subset>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Plain-text export, one prompt per blank-line-separated block
    #[arg(long)]
    pub text_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainArgs {
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[arg(long)]
    pub statements: Option<PathBuf>,
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub subset: Option<Subset>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub per_label: Option<bool>,
    #[arg(long)]
    pub funccall: Option<FuncCallPrecedence>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct PredictArgs {
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[arg(long)]
    pub statements: Option<PathBuf>,
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub subset: Option<Subset>,
    /// prior.json from train-baseline
    #[arg(long)]
    pub prior: Option<PathBuf>,
    /// External adapter command line, split on whitespace
    #[arg(long, conflicts_with = "prior")]
    pub adapter: Option<String>,
    #[arg(long)]
    pub timeout: Option<f64>,
    #[arg(long)]
    pub max_parallel: Option<usize>,
    #[arg(long)]
    pub max_tokens: Option<usize>,
    #[arg(long)]
    pub token_scheme: Option<TokenScheme>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub subset: Option<Subset>,
    #[arg(long)]
    pub pairing: Option<Pairing>,
    /// Score annotators against each other instead of predictions
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub human: Option<bool>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ServeArgs {
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Annotation log; appended to, and resumed from when it exists
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    #[arg(long)]
    pub host: Option<String>,
    #[arg(long)]
    pub port: Option<u16>,
    /// Directory with the built annotation UI, served at /
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Share of samples that get a second annotator
    #[arg(long)]
    pub double_quota: Option<f64>,
    #[arg(long)]
    pub session_minutes: Option<u64>,
}
