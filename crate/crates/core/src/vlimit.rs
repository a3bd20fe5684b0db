//! Samplers for the limit variable `V`, the rescaled gap between the
//! supremum of the zoomed-in process and its maximum on a unit-spaced grid
//! with a uniform random offset.
//!
//! * Brownian `X̂`: `V = min_{i∈ℤ} B_{Υ+i}` for a two-sided Bessel(3) process,
//!   truncated to `K` grid points per side.
//! * Strictly stable `X̂`: the nested-grid statistic
//!   `max_{i≤mn} X̂_{i/m} − max_{i≤n} X̂_i`.
//! * Monotone `X̂`: `V = |X̂_Υ|`.
//!
//! All draws are for the unit-scale limit; callers multiply by `a_{1/n}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::models::{LevyModel, StableLaw};
use crate::scalar::Real;

pub const DEFAULT_BESSEL_POINTS: usize = 150;
pub const DEFAULT_NESTED_SUBDIVISIONS: usize = 100;
pub const DEFAULT_NESTED_STEPS: usize = 100;

fn default_k() -> usize {
    DEFAULT_BESSEL_POINTS
}

fn default_m() -> usize {
    DEFAULT_NESTED_SUBDIVISIONS
}

fn default_n() -> usize {
    DEFAULT_NESTED_STEPS
}

fn unit<T: Real>() -> T {
    T::one()
}

/// Which construction of `V` to use, with its resolution parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub enum VSamplerSpec<T> {
    /// Bessel(3) construction for Brownian `X̂`, `k` grid points per side.
    BesselBrownian {
        #[serde(default = "default_k")]
        k: usize,
    },
    /// Nested-grid construction for strictly stable `X̂`.
    StableNested {
        alpha: T,
        beta: T,
        #[serde(default = "unit")]
        scale: T,
        #[serde(default = "default_m")]
        m: usize,
        #[serde(default = "default_n")]
        n: usize,
    },
    /// `|X̂_Υ|` for a monotone limit process.
    Monotone { model_hat: LevyModel<T> },
}

impl<T> Default for VSamplerSpec<T> {
    fn default() -> Self {
        Self::BesselBrownian { k: DEFAULT_BESSEL_POINTS }
    }
}

impl<T: Real> VSamplerSpec<T> {
    /// The natural construction for the zoomed-in limit of `model`.
    pub fn for_model(model: &LevyModel<T>) -> Self {
        match *model {
            _ if model.is_monotone() => Self::Monotone { model_hat: *model },
            LevyModel::Brownian { .. } => Self::default(),
            LevyModel::StrictlyStable { alpha, beta, .. } => Self::StableNested {
                alpha,
                beta,
                scale: T::one(),
                m: DEFAULT_NESTED_SUBDIVISIONS,
                n: DEFAULT_NESTED_STEPS,
            },
            LevyModel::Drift { .. } => unreachable!("drift is monotone"),
        }
    }

    /// Validates the spec and precomputes sampler constants.
    pub fn build(&self) -> Result<VSampler<T>> {
        Ok(match *self {
            Self::BesselBrownian { k } => {
                ensure!(k >= 1, "bessel sampler needs k >= 1");
                VSampler::Bessel { k }
            }
            Self::StableNested { alpha, beta, scale, m, n } => {
                ensure!(m >= 1 && n >= 1, "nested sampler needs m, n >= 1");
                ensure!(scale > T::zero(), "scale must be positive, got {scale}");
                VSampler::Nested {
                    law: StableLaw::new(alpha, beta)?,
                    grid_factor: T::from_count(m).powf(-alpha.recip()),
                    scale,
                    m,
                    n,
                }
            }
            Self::Monotone { model_hat } => {
                let model_hat = model_hat.checked()?;
                ensure!(
                    model_hat.is_monotone(),
                    "monotone sampler needs a drift or a one-sided stable law with alpha < 1"
                );
                match model_hat {
                    LevyModel::Drift { slope } => VSampler::MonotoneDrift { speed: slope.abs() },
                    LevyModel::StrictlyStable { alpha, beta, scale } => VSampler::MonotoneStable {
                        law: StableLaw::new(alpha, beta)?,
                        inv_alpha: alpha.recip(),
                        scale,
                    },
                    LevyModel::Brownian { .. } => unreachable!("brownian is not monotone"),
                }
            }
        })
    }
}

/// A validated sampler of `V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VSampler<T> {
    Bessel { k: usize },
    Nested {
        law: StableLaw<T>,
        /// `m^{−1/α}`
        grid_factor: T,
        scale: T,
        m: usize,
        n: usize,
    },
    MonotoneDrift { speed: T },
    MonotoneStable { law: StableLaw<T>, inv_alpha: T, scale: T },
}

impl<T: Real> VSampler<T> {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match *self {
            Self::Bessel { k } => bessel_minimum(k, rng),
            Self::Nested { law, grid_factor, scale, m, n } => {
                scale * (grid_factor * nested_gap(&law, m, n, rng))
            }
            Self::MonotoneDrift { speed } => speed * T::open_uniform(rng),
            Self::MonotoneStable { law, inv_alpha, scale } => {
                let upsilon = T::open_uniform(rng);
                scale * upsilon.powf(inv_alpha) * law.sample(rng).abs()
            }
        }
    }
}

/// Minimum of two independent Bessel(3) processes observed at `Υ, Υ+1, …`
/// and `1−Υ, 2−Υ, …`, `k` points each.
///
/// Deviates are consumed in the order Υ, then for each grid index one
/// 3-vector increment of each copy, so a smaller `k` reads a prefix of the
/// same stream.
fn bessel_minimum<T: Real, R: Rng + ?Sized>(k: usize, rng: &mut R) -> T {
    let upsilon = T::open_uniform(rng);
    let mut first = [T::zero(); 3];
    let mut second = [T::zero(); 3];
    let mut min_sq = T::infinity();
    for i in 0..k {
        let (dt_first, dt_second) = if i == 0 {
            (upsilon, T::one() - upsilon)
        } else {
            (T::one(), T::one())
        };
        for (coords, dt) in [(&mut first, dt_first), (&mut second, dt_second)] {
            let sd = dt.sqrt();
            let mut sq = T::zero();
            for c in coords.iter_mut() {
                *c += sd * T::standard_normal(rng);
                sq += *c * *c;
            }
            if sq < min_sq {
                min_sq = sq;
            }
        }
    }
    min_sq.sqrt()
}

/// `max_{i≤mn} S_i − max_{j≤n} S_{jm}` for a random walk `S` of unit-scale
/// stable steps, with `S_0 = 0` included in both maxima.
fn nested_gap<T: Real, R: Rng + ?Sized>(law: &StableLaw<T>, m: usize, n: usize, rng: &mut R) -> T {
    let mut level = T::zero();
    let mut fine_max = T::zero();
    let mut coarse_max = T::zero();
    for _ in 0..n {
        for _ in 0..m {
            level += law.sample(rng);
            if level > fine_max {
                fine_max = level;
            }
        }
        if level > coarse_max {
            coarse_max = level;
        }
    }
    fine_max - coarse_max
}

/// One Bessel-construction draw of `V` for standard Brownian `X̂`.
pub fn sample_v_brownian<T: Real, R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<T> {
    VSamplerSpec::<T>::BesselBrownian { k }.build().map(|s| s.sample(rng))
}

/// One nested-grid draw of `V` for the strictly stable `X̂` with scale `scale`.
pub fn sample_v_stable<T: Real, R: Rng + ?Sized>(
    alpha: T,
    beta: T,
    scale: T,
    m: usize,
    n: usize,
    rng: &mut R,
) -> Result<T> {
    VSamplerSpec::StableNested { alpha, beta, scale, m, n }
        .build()
        .map(|s| s.sample(rng))
}

/// One draw of `V = |X̂_Υ|` for a monotone `X̂`.
pub fn sample_v_monotone<T: Real, R: Rng + ?Sized>(model_hat: LevyModel<T>, rng: &mut R) -> Result<T> {
    VSamplerSpec::Monotone { model_hat }.build().map(|s| s.sample(rng))
}

/// `|X̂_Υ|` for a given time `Υ` and, for stable laws, a given unit-time value `X̂₁`.
pub fn monotone_v_at<T: Real>(model_hat: LevyModel<T>, upsilon: T, unit_value: T) -> Result<T> {
    ensure!(
        upsilon >= T::zero() && upsilon <= T::one(),
        "time must lie in [0, 1], got {upsilon}"
    );
    match (VSamplerSpec::Monotone { model_hat }).build()? {
        VSampler::MonotoneDrift { speed } => Ok(speed * upsilon),
        VSampler::MonotoneStable { inv_alpha, scale, .. } => {
            Ok(scale * upsilon.powf(inv_alpha) * unit_value.abs())
        }
        _ => unreachable!("monotone spec builds a monotone sampler"),
    }
}
