//! Monte Carlo study of the law of `V` across `(α, β)` cells.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::error_study::thread_pool;
use crate::error::{ensure, Result};
use crate::moments::{expected_v, expected_vn, nested_grid_mean};
use crate::stats::{
    kde_gaussian, ks_critical_value, ks_two_sample, mc_summary, quantile_grid, McSummary,
    DEFAULT_GRID_POINTS,
};
use crate::streams::{stream, Purpose};
use crate::vlimit::{DEFAULT_BESSEL_POINTS, DEFAULT_NESTED_STEPS, DEFAULT_NESTED_SUBDIVISIONS};
use crate::{DensityGrid, VSamplerSpec};

/// Bits of the stream index reserved for the draw number within a cell.
const CELL_SHIFT: u32 = 40;

fn one() -> usize {
    1
}

fn default_k() -> usize {
    DEFAULT_BESSEL_POINTS
}

fn default_m() -> usize {
    DEFAULT_NESTED_SUBDIVISIONS
}

fn default_n() -> usize {
    DEFAULT_NESTED_STEPS
}

fn default_grid_points() -> usize {
    DEFAULT_GRID_POINTS
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VCell {
    pub alpha: f64,
    pub beta: f64,
}

/// Parameters of a `V` study.
///
/// ```toml
/// replications = 50000
/// seed = 3
/// cells = [{ alpha = 1.5, beta = 0.0 }, { alpha = 1.2, beta = 0.5 }, { alpha = 1.2, beta = -0.5 }]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VStudyConfig {
    pub cells: Vec<VCell>,
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    /// Subdivisions of the nested grid.
    #[serde(default = "default_m")]
    pub m: usize,
    /// Coarse steps of the nested grid.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Bessel points per side for `α = 2` cells.
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "one")]
    pub workers: usize,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    /// Restrict density grids to this quantile range, e.g. `[0.01, 0.99]`.
    #[serde(default)]
    pub quantile_range: Option<(f64, f64)>,
}

impl VStudyConfig {
    pub fn new(cells: Vec<VCell>, replications: usize, seed: u64) -> Self {
        Self {
            cells,
            replications,
            seed,
            m: default_m(),
            n: default_n(),
            k: default_k(),
            workers: 1,
            grid_points: default_grid_points(),
            quantile_range: None,
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
        ensure!(!self.cells.is_empty(), "v study needs at least one cell");
        ensure!(self.replications >= 2, "v study needs at least two replications per cell");
        ensure!(
            (self.cells.len() as u64) < 1 << (62 - CELL_SHIFT),
            "too many cells"
        );
        ensure!(
            (self.replications as u64) < 1 << CELL_SHIFT,
            "too many replications per cell"
        );
        ensure!(self.workers >= 1, "need at least one worker");
        for cell in &self.cells {
            self.sampler(cell).build()?;
        }
        Ok(())
    }

    /// Bessel construction at `α = 2`, nested grid otherwise.
    pub fn sampler(&self, cell: &VCell) -> VSamplerSpec {
        if cell.alpha == 2.0 {
            VSamplerSpec::BesselBrownian { k: self.k }
        } else {
            VSamplerSpec::StableNested {
                alpha: cell.alpha,
                beta: cell.beta,
                scale: 1.0,
                m: self.m,
                n: self.n,
            }
        }
    }
}

/// Monte Carlo mean against the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentComparison {
    pub mc_mean: f64,
    pub standard_error: f64,
    pub expected_v: f64,
    /// `E V_n` for the coarse step count.
    pub expected_vn: f64,
    /// Exact mean of the nested-grid statistic; `None` for Bessel cells.
    pub nested_grid_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub alpha: f64,
    pub beta: f64,
    pub sampler: VSamplerSpec,
    pub summary: McSummary,
    /// Only for `α > 1`.
    pub moments: Option<MomentComparison>,
    #[serde(skip)]
    pub samples: Vec<f64>,
    #[serde(skip)]
    pub density: DensityGrid,
}

/// KS distance between the cells `(α, β)` and `(α, −β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignFlipCheck {
    pub alpha: f64,
    pub beta: f64,
    pub ks: f64,
    pub critical_value_1pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VStudyReport {
    pub config: VStudyConfig,
    pub cells: Vec<CellReport>,
    pub sign_flips: Vec<SignFlipCheck>,
}

/// Draws for cell number `cell`: draw `j` uses stream `(seed, cell·2⁴⁰ + j, VDraw)`.
pub fn sample_cell(spec: &VSamplerSpec, seed: u64, cell: usize, count: usize) -> Result<Vec<f64>> {
    let sampler = spec.build()?;
    let base = (cell as u64) << CELL_SHIFT;
    Ok((0..count as u64)
        .into_par_iter()
        .map(|j| sampler.sample(&mut stream(seed, base + j, Purpose::VDraw)))
        .collect())
}

pub fn run_v_study(config: &VStudyConfig) -> Result<VStudyReport> {
    config.validate()?;
    let pool = thread_pool(config.workers)?;
    pool.install(|| {
        let mut cells = Vec::with_capacity(config.cells.len());
        for (i, cell) in config.cells.iter().enumerate() {
            let spec = config.sampler(cell);
            let samples = sample_cell(&spec, config.seed, i, config.replications)?;
            let summary = mc_summary(&samples)?;
            let grid = match config.quantile_range {
                Some((lo, hi)) => Some(quantile_grid(&samples, lo, hi, config.grid_points)?),
                None => None,
            };
            let density = kde_gaussian(&samples, None, grid)?;
            let moments = if cell.alpha > 1.0 {
                let nested = match spec {
                    VSamplerSpec::StableNested { m, n, .. } => {
                        Some(nested_grid_mean(cell.alpha, cell.beta, m, n)?)
                    }
                    _ => None,
                };
                Some(MomentComparison {
                    mc_mean: summary.mean,
                    standard_error: summary.standard_error,
                    expected_v: expected_v(cell.alpha, cell.beta)?,
                    expected_vn: expected_vn(cell.alpha, cell.beta, config.n)?,
                    nested_grid_mean: nested,
                })
            } else {
                None
            };
            cells.push(CellReport {
                alpha: cell.alpha,
                beta: cell.beta,
                sampler: spec,
                summary,
                moments,
                samples,
                density,
            });
        }
        let mut sign_flips = Vec::new();
        for (i, a) in cells.iter().enumerate() {
            for b in &cells[i + 1..] {
                if a.alpha == b.alpha && a.beta != 0.0 && a.beta == -b.beta {
                    sign_flips.push(SignFlipCheck {
                        alpha: a.alpha,
                        beta: a.beta,
                        ks: ks_two_sample(&a.samples, &b.samples)?,
                        critical_value_1pct: ks_critical_value(0.01, a.samples.len(), b.samples.len()),
                    });
                }
            }
        }
        Ok(VStudyReport {
            config: config.clone(),
            cells,
            sign_flips,
        })
    })
}

/// One row of the `E V_n → E V` convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub expected_vn: f64,
    pub gap: f64,
    pub relative_gap: f64,
}

pub fn convergence_table(alpha: f64, beta: f64, ns: &[usize]) -> Result<Vec<ConvergenceRow>> {
    let ev = expected_v(alpha, beta)?;
    ns.iter()
        .map(|&n| {
            let evn = expected_vn(alpha, beta, n)?;
            Ok(ConvergenceRow {
                n,
                expected_vn: evn,
                gap: ev - evn,
                relative_gap: (ev - evn) / ev,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parses() {
        let c = VStudyConfig::from_toml_str(
            "replications = 100\ncells = [{ alpha = 1.5, beta = 0.0 }, { alpha = 2.0, beta = 0.0 }]\nquantile_range = [0.01, 0.99]",
        )
        .unwrap();
        assert_eq!(c.m, 100);
        assert_eq!(c.sampler(&c.cells[1]), VSamplerSpec::BesselBrownian { k: 150 });
        assert!(VStudyConfig::from_toml_str("replications = 100\ncells = []").is_err());
        assert!(VStudyConfig::from_toml_str("replications = 100\ncells = [{ alpha = 2.5, beta = 0.0 }]").is_err());
    }

    #[test]
    fn small_study() {
        let cells = vec![
            VCell { alpha: 1.2, beta: 0.5 },
            VCell { alpha: 1.2, beta: -0.5 },
            VCell { alpha: 0.8, beta: 0.0 },
        ];
        let mut config = VStudyConfig::new(cells, 200, 9);
        config.m = 10;
        config.n = 10;
        let report = run_v_study(&config).unwrap();
        assert_eq!(report.cells.len(), 3);
        assert_eq!(report.sign_flips.len(), 1);
        assert!(report.cells[0].moments.is_some());
        assert!(report.cells[2].moments.is_none());
        assert!(report.cells.iter().all(|c| c.samples.iter().all(|&v| v >= 0.0)));
        assert_ne!(report.cells[0].samples, report.cells[1].samples);
    }

    #[test]
    fn convergence_gap_shrinks() {
        let rows = convergence_table(1.5, 0.0, &[1, 10, 100, 1000]).unwrap();
        assert!(rows.windows(2).all(|w| w[1].gap < w[0].gap && w[1].gap > 0.0));
    }
}
