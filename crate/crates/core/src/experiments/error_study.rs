//! Coupled coarse/fine simulation of the terminal reflection error.
//!
//! Each replication draws one fine path, feeds it to a reflector step by
//! step and, in blocks of `n_fine / n` steps, to a second reflector at the
//! coarse resolution. Nothing beyond the two running states is kept, so
//! memory does not grow with `n_fine`.

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use crate::error::{ensure, Result};
use crate::moments::expected_v;
use crate::rectify::{mean_shift, rectify_samples};
use crate::reflection::{Barrier, Summation};
use crate::stats::{ks_critical_value, ks_two_sample, mc_summary, McSummary};
use crate::streams::{stream, Purpose};
use crate::{LevyModel, ReflectionSummary, TwoSidedReflector};

const RECTIFY_CHUNK: usize = 1024;

/// Terminal states of the two reflectors driven by one fine path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledPaths {
    pub coarse: ReflectionSummary,
    pub fine: ReflectionSummary,
}

/// Reflects `n_fine` increments from `next` and their block sums at
/// resolution `n`, both from `x0`.
pub fn simulate_coupled(
    x0: f64,
    n: usize,
    n_fine: usize,
    summation: Summation,
    mut next: impl FnMut() -> f64,
) -> Result<CoupledPaths> {
    ensure!(
        n >= 1 && n_fine.is_multiple_of(n) && n_fine >= n,
        "n_fine = {n_fine} must be a positive multiple of n = {n}"
    );
    let block = n_fine / n;
    let mut fine = TwoSidedReflector::with_summation(x0, summation)?;
    let mut coarse = TwoSidedReflector::with_summation(x0, summation)?;
    for _ in 0..n {
        let mut sum = 0.0;
        for _ in 0..block {
            let xi = next();
            fine.push(xi);
            sum += xi;
        }
        coarse.push(sum);
    }
    Ok(CoupledPaths {
        coarse: coarse.summary(),
        fine: fine.summary(),
    })
}

/// One row of `records.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicationRecord {
    pub replication: u64,
    pub y_coarse: f64,
    pub y_fine: f64,
    /// Fine terminal after the optional mean-shift correction.
    pub y_reference: f64,
    /// `y_reference − y_coarse`.
    pub delta: f64,
    pub rectified: f64,
    pub adjustment: f64,
    pub boundary_skipped: bool,
    pub coarse_rho_l: usize,
    pub coarse_rho_u: usize,
    pub coarse_switches: usize,
    pub coarse_s_event: bool,
    pub fine_rho_l: usize,
    pub fine_rho_u: usize,
    pub fine_switches: usize,
    pub fine_s_event: bool,
    pub l_coarse: f64,
    pub u_coarse: f64,
    pub l_fine: f64,
    pub u_fine: f64,
    pub l_reference: f64,
    pub u_reference: f64,
    pub x_coarse: f64,
    pub x_fine: f64,
}

impl ReplicationRecord {
    pub fn coarse_last(&self) -> Option<Barrier> {
        last_barrier(self.coarse_rho_l, self.coarse_rho_u)
    }

    pub fn fine_last(&self) -> Option<Barrier> {
        last_barrier(self.fine_rho_l, self.fine_rho_u)
    }
}

fn last_barrier(rho_l: usize, rho_u: usize) -> Option<Barrier> {
    match rho_l.cmp(&rho_u) {
        std::cmp::Ordering::Greater => Some(Barrier::Lower),
        std::cmp::Ordering::Less => Some(Barrier::Upper),
        std::cmp::Ordering::Equal => None,
    }
}

/// Fractions of replications by last barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarrierSplit {
    pub lower_last: f64,
    pub upper_last: f64,
    pub unreflected: f64,
}

impl BarrierSplit {
    fn of(lasts: impl Iterator<Item = Option<Barrier>>) -> Self {
        let (mut lower, mut upper, mut none, mut total) = (0usize, 0usize, 0usize, 0usize);
        for last in lasts {
            total += 1;
            match last {
                Some(Barrier::Lower) => lower += 1,
                Some(Barrier::Upper) => upper += 1,
                None => none += 1,
            }
        }
        let frac = |k: usize| k as f64 / total as f64;
        Self {
            lower_last: frac(lower),
            upper_last: frac(upper),
            unreflected: frac(none),
        }
    }
}

/// Scaled error `± Δ / a_{1/n}` conditional on the last barrier, against
/// the independent `V` sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalLaw {
    pub barrier: Barrier,
    /// Also require the fine path to end on the same barrier.
    pub adjusted: bool,
    pub count: usize,
    pub mean: Option<f64>,
    pub ks: Option<f64>,
    pub critical_value_1pct: Option<f64>,
}

/// Distance of raw and rectified coarse terminals to the fine reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitComparison {
    pub ks_raw: f64,
    pub ks_rectified: f64,
    pub out_of_range: usize,
    pub boundary_skipped: usize,
}

/// Mean scaled regulator errors given the coarse switch count and last barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegulatorCell {
    pub switches: usize,
    pub last: Barrier,
    pub count: usize,
    /// Against the mean-shift corrected fine regulators.
    pub mean_lower_error: Option<f64>,
    pub mean_upper_error: Option<f64>,
    /// Against the uncorrected fine regulators.
    pub mean_lower_error_fine: Option<f64>,
    pub mean_upper_error_fine: Option<f64>,
    pub expected_lower_error: Option<f64>,
    pub expected_upper_error: Option<f64>,
}

/// How often the error has the predicted sign away from the barriers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignCensus {
    pub band: f64,
    pub eligible: usize,
    pub matching: usize,
    pub fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregates {
    /// `a_{1/n}` at the coarse resolution.
    pub coarse_scale: f64,
    /// Mean-shift applied to the fine reference, if any.
    pub reference_shift: Option<f64>,
    pub expected_v: Option<f64>,
    pub v_reference: Option<McSummary>,
    pub coarse_split: BarrierSplit,
    pub fine_split: BarrierSplit,
    /// Fraction where coarse and fine disagree on `rho_L > rho_U`.
    pub disagreement: f64,
    pub conditional: Vec<ConditionalLaw>,
    pub fit: FitComparison,
    pub regulators: Vec<RegulatorCell>,
    pub sign_census: SignCensus,
    /// Largest `|Σ coarse increments − Σ fine increments|`.
    pub coupling_max_abs_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub config_hash: String,
    pub code_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub provenance: Provenance,
    pub aggregates: Aggregates,
    /// Written to `records.csv`, not to the JSON report.
    #[serde(skip)]
    pub records: Vec<ReplicationRecord>,
}

pub(super) fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| crate::Error::Parameter(format!("cannot start {workers} workers: {e}")))
}

fn reference_ev(model: &LevyModel) -> Option<f64> {
    match *model {
        LevyModel::Brownian { .. } => expected_v(2.0, 0.0).ok(),
        LevyModel::StrictlyStable { alpha, beta, .. } => expected_v(alpha, beta).ok(),
        LevyModel::Drift { .. } => None,
    }
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Runs the coupled study described by `config`.
pub fn run_error_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let pool = thread_pool(config.workers)?;
    pool.install(|| run_inner(config))
}

fn run_inner(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let model = config.model;
    let increments = model.increment_sampler(1.0 / config.n_fine as f64)?;
    let shift = if config.mean_shift {
        Some(mean_shift(&model, config.n_fine)?)
    } else {
        None
    };

    let paths = (0..config.replications as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(config.seed, r, Purpose::Path);
            simulate_coupled(config.x0, config.n, config.n_fine, config.summation, || {
                increments.draw(&mut rng)
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let coarse: Vec<ReflectionSummary> = paths.iter().map(|p| p.coarse).collect();
    let sampler_spec = config.sampler();
    let rectified = coarse
        .par_chunks(RECTIFY_CHUNK)
        .enumerate()
        .map(|(i, chunk)| {
            rectify_samples(
                chunk,
                &model,
                config.n,
                &sampler_spec,
                config.policy,
                config.seed,
                (i * RECTIFY_CHUNK) as u64,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let sampler = sampler_spec.build()?;
    let v_reference: Vec<f64> = (0..config.v_reference_draws as u64)
        .into_par_iter()
        .map(|j| sampler.sample(&mut stream(config.seed, j, Purpose::VReference)))
        .collect();

    let mut records = Vec::with_capacity(paths.len());
    let rect = rectified.iter().flat_map(|c| {
        c.values
            .iter()
            .zip(&c.adjustments)
            .zip(&c.boundary_skipped)
            .map(|((&v, &a), &s)| (v, a, s))
    });
    for ((r, p), (value, adjustment, skipped)) in paths.iter().enumerate().zip(rect) {
        let (c, f) = (p.coarse, p.fine);
        let s = shift.unwrap_or(0.0);
        let k = f.switches as f64;
        let (y_reference, l_reference, u_reference) = match f.last_barrier() {
            Some(Barrier::Lower) => (f.y_n + s, f.l_n + s * k, f.u_n + s * (k - 1.0)),
            Some(Barrier::Upper) => (f.y_n - s, f.l_n + s * (k - 1.0), f.u_n + s * k),
            None => (f.y_n, f.l_n, f.u_n),
        };
        records.push(ReplicationRecord {
            replication: r as u64,
            y_coarse: c.y_n,
            y_fine: f.y_n,
            y_reference,
            delta: y_reference - c.y_n,
            rectified: value,
            adjustment,
            boundary_skipped: skipped,
            coarse_rho_l: c.rho_l,
            coarse_rho_u: c.rho_u,
            coarse_switches: c.switches,
            coarse_s_event: c.s_event,
            fine_rho_l: f.rho_l,
            fine_rho_u: f.rho_u,
            fine_switches: f.switches,
            fine_s_event: f.s_event,
            l_coarse: c.l_n,
            u_coarse: c.u_n,
            l_fine: f.l_n,
            u_fine: f.u_n,
            l_reference,
            u_reference,
            x_coarse: c.increment_sum,
            x_fine: f.increment_sum,
        });
    }

    let out_of_range = rectified.iter().map(|c| c.out_of_range).sum();
    let aggregates = aggregate(config, &records, &v_reference, shift, out_of_range)?;
    Ok(ExperimentReport {
        config: config.clone(),
        provenance: Provenance {
            seed: config.seed,
            config_hash: config.hash(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
        },
        aggregates,
        records,
    })
}

fn aggregate(
    config: &ExperimentConfig,
    records: &[ReplicationRecord],
    v_reference: &[f64],
    shift: Option<f64>,
    out_of_range: usize,
) -> Result<Aggregates> {
    let scale = config.model.scaling(1.0 / config.n as f64)?;
    let ev = reference_ev(&config.model);

    let disagreement = records
        .iter()
        .filter(|r| (r.coarse_last() == Some(Barrier::Lower)) != (r.fine_last() == Some(Barrier::Lower)))
        .count() as f64
        / records.len() as f64;

    let mut conditional = Vec::new();
    for barrier in [Barrier::Lower, Barrier::Upper] {
        let sign = if barrier == Barrier::Lower { 1.0 } else { -1.0 };
        for adjusted in [false, true] {
            let errors: Vec<f64> = records
                .iter()
                .filter(|r| r.coarse_last() == Some(barrier) && (!adjusted || r.fine_last() == Some(barrier)))
                .map(|r| sign * r.delta / scale)
                .collect();
            let ks = if errors.is_empty() || v_reference.is_empty() {
                None
            } else {
                Some(ks_two_sample(&errors, v_reference)?)
            };
            conditional.push(ConditionalLaw {
                barrier,
                adjusted,
                count: errors.len(),
                mean: mean(&errors),
                ks,
                critical_value_1pct: ks
                    .map(|_| ks_critical_value(0.01, errors.len(), v_reference.len())),
            });
        }
    }

    let reference: Vec<f64> = records.iter().map(|r| r.y_reference).collect();
    let raw: Vec<f64> = records.iter().map(|r| r.y_coarse).collect();
    let rectified: Vec<f64> = records.iter().map(|r| r.rectified).collect();
    let fit = FitComparison {
        ks_raw: ks_two_sample(&raw, &reference)?,
        ks_rectified: ks_two_sample(&rectified, &reference)?,
        out_of_range,
        boundary_skipped: records.iter().filter(|r| r.boundary_skipped).count(),
    };

    let mut regulators = Vec::new();
    for switches in 1..=config.max_switches {
        for last in [Barrier::Lower, Barrier::Upper] {
            let cell: Vec<&ReplicationRecord> = records
                .iter()
                .filter(|r| r.coarse_switches == switches && r.coarse_last() == Some(last))
                .collect();
            let lower: Vec<f64> = cell.iter().map(|r| (r.l_reference - r.l_coarse) / scale).collect();
            let upper: Vec<f64> = cell.iter().map(|r| (r.u_reference - r.u_coarse) / scale).collect();
            let lower_fine: Vec<f64> = cell.iter().map(|r| (r.l_fine - r.l_coarse) / scale).collect();
            let upper_fine: Vec<f64> = cell.iter().map(|r| (r.u_fine - r.u_coarse) / scale).collect();
            let k = switches as f64;
            let (own, other) = (ev.map(|e| k * e), ev.map(|e| (k - 1.0) * e));
            let (expected_lower_error, expected_upper_error) = match last {
                Barrier::Lower => (own, other),
                Barrier::Upper => (other, own),
            };
            regulators.push(RegulatorCell {
                switches,
                last,
                count: cell.len(),
                mean_lower_error: mean(&lower),
                mean_upper_error: mean(&upper),
                mean_lower_error_fine: mean(&lower_fine),
                mean_upper_error_fine: mean(&upper_fine),
                expected_lower_error,
                expected_upper_error,
            });
        }
    }

    let band = config.boundary_band;
    let eligible: Vec<&ReplicationRecord> = records
        .iter()
        .filter(|r| {
            r.coarse_last().is_some()
                && r.coarse_last() == r.fine_last()
                && r.y_fine > band
                && r.y_fine < 1.0 - band
        })
        .collect();
    let matching = eligible
        .iter()
        .filter(|r| match r.coarse_last() {
            Some(Barrier::Lower) => r.delta > 0.0,
            Some(Barrier::Upper) => r.delta < 0.0,
            None => false,
        })
        .count();
    let sign_census = SignCensus {
        band,
        eligible: eligible.len(),
        matching,
        fraction: (!eligible.is_empty()).then(|| matching as f64 / eligible.len() as f64),
    };

    let coupling_max_abs_difference = records
        .iter()
        .map(|r| (r.x_coarse - r.x_fine).abs())
        .fold(0.0, f64::max);

    let v_summary = if v_reference.is_empty() {
        None
    } else {
        Some(mc_summary(v_reference)?)
    };

    Ok(Aggregates {
        coarse_scale: scale,
        reference_shift: shift,
        expected_v: ev,
        v_reference: v_summary,
        coarse_split: BarrierSplit::of(records.iter().map(|r| r.coarse_last())),
        fine_split: BarrierSplit::of(records.iter().map(|r| r.fine_last())),
        disagreement,
        conditional,
        fit,
        regulators,
        sign_census,
        coupling_max_abs_difference,
    })
}
