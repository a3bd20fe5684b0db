use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ensure, Result};
use crate::rectify::{mean_shift, RectifyPolicy};
use crate::reflection::Summation;
use crate::{LevyModel, VSamplerSpec};

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

fn default_reference_draws() -> usize {
    20_000
}

fn default_band() -> f64 {
    0.05
}

fn default_max_switches() -> usize {
    5
}

/// Parameters of a coupled coarse/fine error study.
///
/// ```toml
/// x0 = 0.3
/// n = 100
/// n_fine = 10000
/// replications = 20000
/// seed = 7
///
/// [model]
/// kind = "brownian"
/// mu = -0.5
/// sigma2 = 2.0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: LevyModel,
    pub x0: f64,
    /// Coarse resolution.
    pub n: usize,
    /// Fine resolution, a multiple of `n`.
    pub n_fine: usize,
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to the natural sampler for `model`.
    #[serde(default)]
    pub v_sampler: Option<VSamplerSpec>,
    #[serde(default)]
    pub policy: RectifyPolicy,
    /// Worker threads. Does not affect results.
    #[serde(default = "one")]
    pub workers: usize,
    /// Correct the fine reference by `± a_{1/n_fine} E V`.
    #[serde(default = "yes")]
    pub mean_shift: bool,
    /// Size of the independent `V` sample used in the conditional KS checks.
    #[serde(default = "default_reference_draws")]
    pub v_reference_draws: usize,
    #[serde(default)]
    pub summation: Summation,
    /// Samples with the fine terminal within this distance of a barrier are
    /// left out of the error-sign census.
    #[serde(default = "default_band")]
    pub boundary_band: f64,
    /// Largest switch count tabulated in the regulator-error table.
    #[serde(default = "default_max_switches")]
    pub max_switches: usize,
}

impl ExperimentConfig {
    /// Config with every optional field at its default.
    pub fn new(model: LevyModel, x0: f64, n: usize, n_fine: usize, replications: usize, seed: u64) -> Self {
        Self {
            model,
            x0,
            n,
            n_fine,
            replications,
            seed,
            v_sampler: None,
            policy: RectifyPolicy::default(),
            workers: 1,
            mean_shift: true,
            v_reference_draws: default_reference_draws(),
            summation: Summation::default(),
            boundary_band: default_band(),
            max_switches: default_max_switches(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.checked()?;
        ensure!((0.0..=1.0).contains(&self.x0), "x0 must lie in [0, 1], got {}", self.x0);
        ensure!(self.n >= 1, "coarse resolution must be positive");
        ensure!(
            self.n_fine >= self.n && self.n_fine.is_multiple_of(self.n),
            "n_fine = {} must be a multiple of n = {}",
            self.n_fine,
            self.n
        );
        ensure!(self.replications >= 1, "need at least one replication");
        ensure!(self.workers >= 1, "need at least one worker");
        ensure!(
            (0.0..0.5).contains(&self.boundary_band),
            "boundary band must lie in [0, 0.5), got {}",
            self.boundary_band
        );
        if self.mean_shift {
            mean_shift(&self.model, self.n_fine)?;
        }
        self.sampler().build()?;
        Ok(())
    }

    /// The `V` sampler used for rectification and the reference sample.
    pub fn sampler(&self) -> VSamplerSpec {
        self.v_sampler.unwrap_or_else(|| VSamplerSpec::for_model(&self.model))
    }

    /// SHA-256 of the canonical JSON form, ignoring `workers`.
    pub fn hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("workers");
        }
        hex::encode(Sha256::digest(value.to_string().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
        x0 = 0.3
        n = 100
        n_fine = 50000
        replications = 20000
        seed = 11

        [model]
        kind = "brownian"
        mu = -0.5
        sigma2 = 2.0
    "#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(c.n_fine, 50_000);
        assert_eq!(c.workers, 1);
        assert!(c.mean_shift);
        assert_eq!(c.sampler(), VSamplerSpec::default());
        assert_eq!(c, ExperimentConfig::new(c.model, 0.3, 100, 50_000, 20_000, 11));
    }

    #[test]
    fn rejects_bad_configs() {
        let model = LevyModel::brownian(0.0, 1.0).unwrap();
        let ok = ExperimentConfig::new(model, 0.5, 10, 100, 5, 0);
        assert!(ok.validate().is_ok());
        assert!(ExperimentConfig { n_fine: 105, ..ok.clone() }.validate().is_err());
        assert!(ExperimentConfig { x0: 1.5, ..ok.clone() }.validate().is_err());
        assert!(ExperimentConfig { replications: 0, ..ok.clone() }.validate().is_err());
        let drift = ExperimentConfig { model: LevyModel::drift(1.0).unwrap(), ..ok.clone() };
        assert!(drift.validate().is_err());
        assert!(ExperimentConfig { mean_shift: false, ..drift }.validate().is_ok());
        assert!(ExperimentConfig::from_toml_str(&format!("bogus = 1\n{SAMPLE}")).is_err());
    }

    #[test]
    fn hash_ignores_workers() {
        let c = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        let h = c.hash();
        assert_eq!(h.len(), 64);
        assert_eq!(ExperimentConfig { workers: 8, ..c.clone() }.hash(), h);
        assert_ne!(ExperimentConfig { seed: 12, ..c }.hash(), h);
    }
}
