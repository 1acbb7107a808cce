//! Attribute-efficient list-decodable mean estimation for sparse Gaussian
//! means, and its application to learning sparse halfspaces.
//!
//! Given `n` samples in `R^d` of which only a fraction `2α` (possibly well
//! under one half) are drawn from `N(μ, I)` with `‖μ‖₀ ≤ k`, the estimator
//! returns a short list of candidate means, one of which is close to `μ`.
//!
//! The pipeline is:
//!
//! 1. [`cluster`] splits the samples into a few ℓ∞-bounded groups;
//! 2. [`orchestrator`] runs a work list of `(subset, α)` items through
//!    [`multifilter`], which either returns a candidate, rejects the subset, or
//!    splits it using the filters in [`filter_basic`] and
//!    [`filter_quadratic`];
//! 3. list reduction prunes the candidates to `O(1/α)`.
//!
//! ```
//! use listdec::{generate, run_list_decode, CorruptionModel, EstimationParams, RunOptions};
//!
//! let data = generate(20, 2, 400, 0.5, 5.0, &CorruptionModel::MirroredMean, 1).unwrap();
//! let params = EstimationParams::new(0.25, 0.1, 2, 20, 10.0).unwrap();
//! let (list, _trace) = run_list_decode(&data.dataset, &params, &RunOptions::default()).unwrap();
//! assert!(!list.reduced.is_empty());
//! ```

pub mod cluster;
pub mod datagen;
pub mod dataset;
pub mod error;
pub mod filter_basic;
pub mod filter_quadratic;
pub mod halfspace;
pub mod io;
pub mod multifilter;
pub mod orchestrator;
pub mod params;
pub mod polynomials;
pub mod sparse;
pub mod types;

pub use cluster::{cluster, cluster_with, linf_diameter, ClusterOptions, ClusterOutput};
pub use datagen::{generate, random_decoys, CorruptionModel, LabeledDataset};
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use filter_basic::{basic_multifilter, BasicOutcome, BasicThresholds, NoReason};
pub use halfspace::{
    disagreement, generate_halfspace, learn_halfspaces, reduce_to_mean, HalfspaceAdversary,
    HalfspaceHypothesis, LabeledSample,
};
pub use multifilter::{attribute_efficient_multifilter, Branch, FilterReport, MomentSummary};
pub use orchestrator::{
    list_reduction, run_list_decode, BranchCounts, CandidateList, PartialRun, ReductionParams,
    RunOptions, RunTrace,
};
pub use params::{required_sample_size, EstimationParams, FilterParams};
pub use polynomials::{eval_probe, gaussian_moments, hermite_eval, HarmonicQuadratic, PolyProbe, SparseLinear};
pub use sparse::hard_threshold;
pub use types::{FilterOutcome, WorkItem};
