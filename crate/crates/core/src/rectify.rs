//! Rectification of coarse-grid terminal values.
//!
//! A terminal value whose last regulator increase was at the lower barrier
//! is pushed up by an independent draw of `a_{1/n} V`; one whose last increase
//! was at the upper barrier is pushed down by the same amount; values that
//! were never reflected are left alone.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::models::LevyModel;
use crate::moments::expected_v;
use crate::reflection::{Barrier, ReflectionSummary};
use crate::scalar::Real;
use crate::streams::{stream, Purpose};
use crate::vlimit::VSamplerSpec;

/// Post-processing choices for rectified values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RectifyPolicy {
    /// Clip rectified values to `[0, 1]`.
    pub clamp_to_unit: bool,
    /// Leave values sitting exactly on a barrier untouched (irregular models).
    pub skip_boundary_samples: bool,
}

/// Output of [`rectify_samples`].
#[derive(Debug, Clone, PartialEq)]
pub struct Rectified<T> {
    pub values: Vec<T>,
    /// Signed adjustment applied to each value (before clamping).
    pub adjustments: Vec<T>,
    /// Values passed through because they sat on a barrier.
    pub boundary_skipped: Vec<bool>,
    /// Number of rectified values outside `[0, 1]` before clamping.
    pub out_of_range: usize,
}

/// Applies one adjustment. Returns `(value, adjustment, skipped, out_of_range)`.
pub fn rectify_value<T: Real>(
    y_n: T,
    last: Option<Barrier>,
    scaled_v: T,
    policy: RectifyPolicy,
) -> (T, T, bool, bool) {
    if policy.skip_boundary_samples && (y_n == T::zero() || y_n == T::one()) && last.is_some() {
        return (y_n, T::zero(), true, false);
    }
    let adjustment = match last {
        Some(Barrier::Lower) => scaled_v,
        Some(Barrier::Upper) => -scaled_v,
        None => T::zero(),
    };
    let value = y_n + adjustment;
    let outside = value < T::zero() || value > T::one();
    let value = if policy.clamp_to_unit {
        value.max(T::zero()).min(T::one())
    } else {
        value
    };
    (value, adjustment, false, outside)
}

/// Rectifies terminal values produced at resolution `n` under `model`.
///
/// The `V` draw for the outcome at position `i` comes from the stream
/// `(seed, first_index + i, VDraw)` and is only made when an adjustment is
/// needed, so results do not depend on how outcomes are batched.
pub fn rectify_samples<T: Real>(
    outcomes: &[ReflectionSummary<T>],
    model: &LevyModel<T>,
    n: usize,
    sampler: &VSamplerSpec<T>,
    policy: RectifyPolicy,
    seed: u64,
    first_index: u64,
) -> Result<Rectified<T>> {
    ensure!(n >= 1, "resolution must be positive");
    if let Some(bad) = outcomes.iter().find(|o| o.n != n) {
        return Err(crate::Error::Parameter(format!(
            "outcome has resolution {} but rectification was asked for {n}",
            bad.n
        )));
    }
    let scale = model.scaling(T::from_count(n).recip())?;
    let sampler = sampler.build()?;
    let mut out = Rectified {
        values: Vec::with_capacity(outcomes.len()),
        adjustments: Vec::with_capacity(outcomes.len()),
        boundary_skipped: Vec::with_capacity(outcomes.len()),
        out_of_range: 0,
    };
    for (i, outcome) in outcomes.iter().enumerate() {
        let last = outcome.last_barrier();
        let scaled_v = match last {
            Some(_) => {
                let mut rng = stream(seed, first_index + i as u64, Purpose::VDraw);
                scale * sampler.sample(&mut rng)
            }
            None => T::zero(),
        };
        let (value, adjustment, skipped, outside) = rectify_value(outcome.y_n, last, scaled_v, policy);
        out.values.push(value);
        out.adjustments.push(adjustment);
        out.boundary_skipped.push(skipped);
        out.out_of_range += usize::from(outside);
    }
    Ok(out)
}

/// Expected error magnitude `a_{1/n} E V` at resolution `n`.
pub fn mean_shift<T: Real>(model: &LevyModel<T>, n: usize) -> Result<T> {
    ensure!(n >= 1, "resolution must be positive");
    let (alpha, beta) = match *model {
        LevyModel::Brownian { .. } => (T::lit(2.0), T::zero()),
        LevyModel::StrictlyStable { alpha, beta, .. } => (alpha, beta),
        LevyModel::Drift { .. } => {
            return Err(crate::Error::Parameter(
                "the mean of V is only available for alpha in (1, 2]".into(),
            ))
        }
    };
    Ok(model.scaling(T::from_count(n).recip())? * expected_v(alpha, beta)?)
}

/// Fine-grid terminal values corrected by `± a_{1/n} E V` according to the last barrier.
pub fn mean_shift_reference<T: Real>(
    outcomes: &[ReflectionSummary<T>],
    model: &LevyModel<T>,
    n_fine: usize,
) -> Result<Vec<T>> {
    let shift = mean_shift(model, n_fine)?;
    Ok(outcomes
        .iter()
        .map(|o| match o.last_barrier() {
            Some(Barrier::Lower) => o.y_n + shift,
            Some(Barrier::Upper) => o.y_n - shift,
            None => o.y_n,
        })
        .collect())
}
