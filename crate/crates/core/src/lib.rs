//! Simulation of two-sided reflected Lévy processes on a grid, the limit law
//! of the discretization error, and rectification of coarse-grid samples.
//!
//! The numerical core is generic over the scalar type (see [`scalar`]); the
//! aliases below fix it to `f64`, which is what the experiments and the CLI
//! use.

pub mod error;
pub mod experiments;
pub mod models;
pub mod moments;
pub mod rectify;
pub mod reflection;
pub mod scalar;
pub mod special;
pub mod stats;
pub mod streams;
pub mod vlimit;

pub use error::{Error, Result};
pub use models::{IncrementSampler, LevyModel as GenericLevyModel, RegularityFlags, StableLaw as GenericStableLaw};
pub use rectify::RectifyPolicy;
pub use reflection::{Barrier, Summation};
pub use scalar::{Real, Scalar};
pub use vlimit::VSamplerSpec as GenericVSamplerSpec;

pub type LevyModel = models::LevyModel<f64>;
pub type StableLaw = models::StableLaw<f64>;
pub type SkeletonPath = reflection::SkeletonPath<f64>;
pub type ReflectionOutcome = reflection::ReflectionOutcome<f64>;
pub type ReflectionSummary = reflection::ReflectionSummary<f64>;
pub type TwoSidedReflector = reflection::TwoSidedReflector<f64>;
pub type VSamplerSpec = vlimit::VSamplerSpec<f64>;
pub type VSampler = vlimit::VSampler<f64>;
pub type DensityGrid = stats::DensityGrid<f64>;
