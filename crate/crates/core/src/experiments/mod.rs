//! Seeded, reproducible experiments built on the library: the coupled
//! coarse/fine error study with rectification, and the study of the law of
//! `V` across stable parameters.
//!
//! All randomness comes from [`crate::streams`], so reports do not depend on
//! the number of worker threads.

pub mod config;
pub mod error_study;
pub mod io;
pub mod v_study;

pub use config::ExperimentConfig;
pub use error_study::{run_error_experiment, simulate_coupled, ExperimentReport, ReplicationRecord};
pub use v_study::{convergence_table, run_v_study, VCell, VStudyConfig, VStudyReport};
