//! Command-line flags and their conversion to [`ExperimentConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Command, ExperimentConfig, Params};
use crate::error::{CliError, CliResult};
use crate::spec::{parse_seeds, AdversarySpec, ModelSpec};

#[derive(Debug, Parser)]
#[command(name = "listdec", version, about = "List-decodable sparse mean estimation experiments")]
pub struct Cli {
    /// Worker threads (defaults to one per core).
    #[arg(long, env = "LISTDEC_THREADS", global = true)]
    pub threads: Option<usize>,

    /// Replay a config saved from a run log instead of reading flags.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Sub>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Generate a dataset file and its ground-truth sidecar.
    Gen(GenArgs),
    /// Run the estimator on a dataset file.
    Estimate(EstimateArgs),
    /// Learn sparse halfspaces on generated labeled samples.
    Halfspace(HalfspaceArgs),
    /// Generate and estimate over a grid of alpha values and seeds.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Confidence parameter.
    #[arg(long, default_value_t = 0.1)]
    pub tau: f64,
    /// Sparsity of the mean.
    #[arg(long)]
    pub k: Option<usize>,
    /// Dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Threshold constant.
    #[arg(long = "big-c", default_value_t = 10.0)]
    pub big_c: f64,
    /// Node budget of the filter tree.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Output path (CSV, or the dataset for `gen`); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run log path; defaults to the output path with a `.log.json` extension.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SeedArgs {
    #[arg(long, conflicts_with = "seeds")]
    pub seed: Option<u64>,
    /// `a..b` or a comma-separated list.
    #[arg(long)]
    pub seeds: Option<String>,
}

impl SeedArgs {
    fn resolve(&self) -> CliResult<Vec<u64>> {
        match (&self.seed, &self.seeds) {
            (Some(s), _) => Ok(vec![*s]),
            (None, Some(spec)) => parse_seeds(spec),
            (None, None) => Ok(vec![0]),
        }
    }
}

#[derive(Debug, Args)]
pub struct Sampling {
    /// Number of samples.
    #[arg(long)]
    pub n: Option<usize>,
    /// Multiplier of the theoretical sample size, used when --n is absent.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Magnitude of each nonzero entry of the planted mean.
    #[arg(long, default_value_t = 5.0)]
    pub magnitude: f64,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub alpha: f64,
    /// Corruption model, e.g. `mirrored` or `decoys:2:11:1`.
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Dataset file written by `gen`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub alpha: f64,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct HalfspaceArgs {
    #[arg(long)]
    pub alpha: f64,
    /// `flip`, `random` or `shifted:m`.
    #[arg(long, default_value = "shifted:15")]
    pub model: String,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated alpha values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub alpha: Vec<f64>,
    #[arg(long)]
    pub model: String,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub common: Common,
}

fn params(alpha: Vec<f64>, c: &Common, s: Option<&Sampling>) -> Params {
    Params {
        alpha,
        tau: c.tau,
        k: c.k,
        d: c.d,
        n: s.and_then(|s| s.n),
        big_c: c.big_c,
        scale: s.and_then(|s| s.scale),
        magnitude: s.map_or(5.0, |s| s.magnitude),
    }
}

fn config(command: Command, alpha: Vec<f64>, c: &Common, s: Option<&Sampling>, seeds: Vec<u64>) -> ExperimentConfig {
    ExperimentConfig {
        command,
        dataset: None,
        params: params(alpha, c, s),
        model: None,
        adversary: None,
        seeds,
        output: c.out.clone(),
        log: c.log.clone(),
        budget: c.budget,
    }
}

impl Sub {
    pub fn to_config(&self) -> CliResult<ExperimentConfig> {
        let cfg = match self {
            Sub::Gen(a) => ExperimentConfig {
                model: Some(a.model.parse::<ModelSpec>()?),
                ..config(Command::Gen, vec![a.alpha], &a.common, Some(&a.sampling), vec![a.seed])
            },
            Sub::Estimate(a) => ExperimentConfig {
                dataset: Some(a.data.clone()),
                ..config(Command::Estimate, vec![a.alpha], &a.common, None, a.seeds.resolve()?)
            },
            Sub::Halfspace(a) => ExperimentConfig {
                adversary: Some(a.model.parse::<AdversarySpec>()?),
                ..config(Command::Halfspace, vec![a.alpha], &a.common, Some(&a.sampling), a.seeds.resolve()?)
            },
            Sub::Sweep(a) => ExperimentConfig {
                model: Some(a.model.parse::<ModelSpec>()?),
                ..config(Command::Sweep, a.alpha.clone(), &a.common, Some(&a.sampling), a.seeds.resolve()?)
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl Cli {
    pub fn to_config(&self) -> CliResult<ExperimentConfig> {
        match (&self.config, &self.command) {
            (Some(path), None) => crate::commands::load_config(path),
            (None, Some(sub)) => sub.to_config(),
            _ => Err(CliError::input("give a subcommand or --config")),
        }
    }
}
