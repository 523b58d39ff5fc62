//! Fairness-constrained classifier training.
//!
//! Trains a small feed-forward classifier under equal-opportunity loss
//! objectives that penalize per-group loss deviations, alongside the
//! classic dataset-level mitigations (balanced downsampling, inverse-joint
//! reweighting, adaptive batch sampling), and measures the resulting
//! accuracy-fairness tradeoff with RMS TPR-gap and F1 metrics.
//!
//! The numeric core is generic over the scalar type ([`Scalar`], implemented
//! for `f32` and `f64`); everything defaults to `f64`, which is what the
//! training harness, the reports and the CLI use.

pub mod dataset;
pub mod error;
pub mod fairbatch;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod objectives;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Concrete `f64` aliases for the scalar-generic core types.
pub type Dataset = dataset::Dataset<f64>;
pub type SynthSpec = dataset::SynthSpec<f64>;
pub type ModelParams = model::ModelParams<f64>;
pub type OptimState = model::OptimState<f64>;
pub type ForwardResult = model::ForwardResult<f64>;
pub type ObjectiveSpec = objectives::ObjectiveSpec<f64>;
pub type GroupLossTable = objectives::GroupLossTable<f64>;
pub type EffectiveWeights = objectives::EffectiveWeights<f64>;
pub type SamplerState = fairbatch::SamplerState<f64>;

/// Single-precision variants.
pub type DatasetF32 = dataset::Dataset<f32>;
pub type ModelParamsF32 = model::ModelParams<f32>;
