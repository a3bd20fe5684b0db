//! Driving Lévy models: increments, small-time scaling and regularity.
//!
//! Three local behaviours are supported: Brownian motion with drift, strictly
//! α-stable processes, and a pure linear drift. Stable laws follow the
//! characteristic exponent
//!
//! ```text
//! log E exp(iθ X₁) = −c^α |θ|^α (1 − iβ tan(πα/2) sgn θ)
//! ```
//!
//! and are sampled with the Chambers–Mallows–Stuck transform of a uniform and
//! an exponential deviate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::scalar::Real;

/// Model of the driving process `X` (or of its zoomed-in limit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub enum LevyModel<T> {
    /// Brownian motion with drift `mu` and variance `sigma2` per unit time.
    Brownian { mu: T, sigma2: T },
    /// Strictly α-stable process with skewness `beta` and scale `scale`.
    #[serde(rename = "stable")]
    StrictlyStable {
        alpha: T,
        beta: T,
        #[serde(default = "unit")]
        scale: T,
    },
    /// Deterministic linear drift.
    Drift { slope: T },
}

fn unit<T: Real>() -> T {
    T::one()
}

/// Whether the process enters each open half-line immediately from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityFlags {
    /// Regular for `(0, ∞)`.
    pub regular_up: bool,
    /// Regular for `(−∞, 0)`.
    pub regular_down: bool,
}

impl RegularityFlags {
    pub fn both(&self) -> bool {
        self.regular_up && self.regular_down
    }
}

impl<T: Real> LevyModel<T> {
    pub fn brownian(mu: T, sigma2: T) -> Result<Self> {
        Self::Brownian { mu, sigma2 }.checked()
    }

    /// Strictly stable model. `alpha = 2` is the Gaussian boundary and is
    /// returned as `Brownian { mu: 0, sigma2: 2 c² }`.
    pub fn stable(alpha: T, beta: T, scale: T) -> Result<Self> {
        Self::StrictlyStable { alpha, beta, scale }.checked()
    }

    pub fn drift(slope: T) -> Result<Self> {
        Self::Drift { slope }.checked()
    }

    /// Validates the parameters and routes `alpha = 2` to the Brownian variant.
    pub fn checked(self) -> Result<Self> {
        match self {
            Self::Brownian { mu, sigma2 } => {
                ensure!(mu.is_finite(), "brownian drift must be finite, got {mu}");
                ensure!(
                    sigma2 > T::zero() && sigma2.is_finite(),
                    "brownian variance must be positive, got {sigma2}"
                );
                Ok(self)
            }
            Self::StrictlyStable { alpha, beta, scale } => {
                ensure!(
                    scale > T::zero() && scale.is_finite(),
                    "stable scale must be positive, got {scale}"
                );
                if alpha == T::lit(2.0) {
                    return Ok(Self::Brownian {
                        mu: T::zero(),
                        sigma2: T::lit(2.0) * scale * scale,
                    });
                }
                StableLaw::new(alpha, beta)?;
                Ok(self)
            }
            Self::Drift { slope } => {
                ensure!(
                    slope != T::zero() && slope.is_finite(),
                    "drift slope must be finite and non-zero, got {slope}"
                );
                Ok(self)
            }
        }
    }

    /// Self-similarity index α of the zoomed-in limit.
    pub fn index(&self) -> T {
        match *self {
            Self::Brownian { .. } => T::lit(2.0),
            Self::StrictlyStable { alpha, .. } => alpha,
            Self::Drift { .. } => T::one(),
        }
    }

    /// Small-time scaling function `a_ε`, regularly varying at 0 with index 1/α.
    pub fn scaling(&self, eps: T) -> Result<T> {
        ensure!(eps > T::zero(), "scaling needs eps > 0, got {eps}");
        Ok(match *self {
            Self::Brownian { sigma2, .. } => sigma2.sqrt() * eps.sqrt(),
            Self::StrictlyStable { alpha, scale, .. } => scale * eps.powf(alpha.recip()),
            Self::Drift { slope } => slope.abs() * eps,
        })
    }

    pub fn regularity(&self) -> RegularityFlags {
        let flags = |up, down| RegularityFlags {
            regular_up: up,
            regular_down: down,
        };
        match *self {
            Self::Brownian { .. } => flags(true, true),
            Self::StrictlyStable { alpha, beta, .. } => {
                if alpha >= T::one() || beta.abs() < T::one() {
                    flags(true, true)
                } else if beta > T::zero() {
                    // subordinator: only moves up
                    flags(true, false)
                } else {
                    flags(false, true)
                }
            }
            Self::Drift { slope } => flags(slope > T::zero(), slope < T::zero()),
        }
    }

    /// True when paths are monotone (drift, or stable with α < 1 and |β| = 1).
    pub fn is_monotone(&self) -> bool {
        !self.regularity().both()
    }

    /// Sampler of increments over a time step `dt`.
    pub fn increment_sampler(&self, dt: T) -> Result<IncrementSampler<T>> {
        ensure!(dt > T::zero(), "time step must be positive, got {dt}");
        Ok(match *self {
            Self::Brownian { mu, sigma2 } => {
                ensure!(sigma2 > T::zero(), "brownian variance must be positive");
                IncrementSampler::Gaussian {
                    mean: mu * dt,
                    sd: (sigma2 * dt).sqrt(),
                }
            }
            Self::StrictlyStable { alpha, beta, scale } => IncrementSampler::Stable {
                law: StableLaw::new(alpha, beta)?,
                factor: scale * dt.powf(alpha.recip()),
            },
            Self::Drift { slope } => IncrementSampler::Constant(slope * dt),
        })
    }
}

/// Draws increments of a model over a fixed time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IncrementSampler<T> {
    Gaussian { mean: T, sd: T },
    Stable { law: StableLaw<T>, factor: T },
    Constant(T),
}

impl<T: Real> IncrementSampler<T> {
    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match *self {
            Self::Gaussian { mean, sd } => {
                mean + sd * T::standard_normal(rng)
            }
            Self::Stable { law, factor } => factor * law.sample(rng),
            Self::Constant(step) => step,
        }
    }
}

/// Gaussian increment `mu·dt + sqrt(sigma2·dt)·z` for a given standard normal deviate.
pub fn sample_brownian_increment<T: Real>(mu: T, sigma2: T, dt: T, z: T) -> Result<T> {
    ensure!(dt > T::zero(), "time step must be positive, got {dt}");
    ensure!(sigma2 > T::zero(), "brownian variance must be positive, got {sigma2}");
    Ok(mu * dt + (sigma2 * dt).sqrt() * z)
}

/// Strictly stable increment over time `dt` with unit scale, computed from a
/// uniform deviate `u ∈ (0,1)` and a standard exponential deviate `w > 0`.
///
/// Equals `dt^{1/α}` times the unit-time value for the same deviates.
pub fn sample_stable_increment<T: Real>(alpha: T, beta: T, dt: T, u: T, w: T) -> Result<T> {
    ensure!(dt > T::zero(), "time step must be positive, got {dt}");
    let law = StableLaw::new(alpha, beta)?;
    Ok(dt.powf(alpha.recip()) * law.transform(u, w)?)
}

/// Precomputed Chambers–Mallows–Stuck constants for a unit-scale strictly
/// stable law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableLaw<T> {
    alpha: T,
    beta: T,
    /// `arctan(β tan(πα/2)) / α`
    shift: T,
    /// `(1 + β² tan²(πα/2))^{1/(2α)}`
    amplitude: T,
    inv_alpha: T,
}

impl<T: Real> StableLaw<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        ensure!(
            alpha > T::zero() && alpha < T::lit(2.0),
            "stable index must lie in (0, 2), got {alpha}"
        );
        ensure!(
            beta >= -T::one() && beta <= T::one(),
            "stable skewness must lie in [-1, 1], got {beta}"
        );
        ensure!(
            alpha != T::one() || beta == T::zero(),
            "alpha = 1 is strictly stable only for beta = 0, got {beta}"
        );
        let zeta = beta * (T::PI() * alpha / T::lit(2.0)).tan();
        let (shift, amplitude) = if alpha == T::one() {
            (T::zero(), T::one())
        } else {
            (
                zeta.atan() / alpha,
                (T::one() + zeta * zeta).powf(T::one() / (T::lit(2.0) * alpha)),
            )
        };
        Ok(Self {
            alpha,
            beta,
            shift,
            amplitude,
            inv_alpha: alpha.recip(),
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// Deterministic CMS map; checks the deviates' ranges.
    pub fn transform(&self, u: T, w: T) -> Result<T> {
        ensure!(u > T::zero() && u < T::one(), "uniform deviate must lie in (0,1), got {u}");
        ensure!(w > T::zero(), "exponential deviate must be positive, got {w}");
        Ok(self.transform_unchecked(u, w))
    }

    #[inline]
    pub(crate) fn transform_unchecked(&self, u: T, w: T) -> T {
        let theta = T::PI() * (u - T::lit(0.5));
        if self.alpha == T::one() {
            return theta.tan();
        }
        let t = theta + self.shift;
        let outer = theta.cos();
        let inner = (theta - self.alpha * t).cos() / w;
        // cos(θ)^{-1/α} · inner^{(1−α)/α} = (inner / cos θ)^{1/α} / inner
        self.amplitude * (self.alpha * t).sin() * (inner / outer).powf(self.inv_alpha) / inner
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let u = T::open_uniform(rng);
        let w = T::standard_exponential(rng);
        self.transform_unchecked(u, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::{stream, Purpose};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn brownian_increment_examples() {
        assert_eq!(sample_brownian_increment(0.0, 1.0, 1.0, 0.0).unwrap(), 0.0);
        let v = sample_brownian_increment(-0.5, 2.0, 0.01, 1.0).unwrap();
        assert!(close(v, -0.005 + 0.02f64.sqrt(), 1e-15), "{v}");
        assert!(close(v, 0.136421, 1e-6));
        let v = sample_brownian_increment(3.0, 4.0, 0.25, -1.0).unwrap();
        assert!(close(v, -0.25, 1e-15));
        assert!(sample_brownian_increment(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(sample_brownian_increment(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(sample_brownian_increment(0.0, -1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn stable_increment_examples() {
        let cauchy = sample_stable_increment(1.0, 0.0, 1.0, 0.75, 3.7).unwrap();
        assert!(close(cauchy, 1.0, 1e-15), "{cauchy}");
        assert_eq!(sample_stable_increment(1.5, 0.0, 1.0, 0.5, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn stable_parameter_errors() {
        assert!(sample_stable_increment(2.0, 0.0, 1.0, 0.3, 1.0).is_err());
        assert!(sample_stable_increment(0.0, 0.0, 1.0, 0.3, 1.0).is_err());
        assert!(sample_stable_increment(1.0, 0.5, 1.0, 0.3, 1.0).is_err());
        assert!(sample_stable_increment(1.5, 1.5, 1.0, 0.3, 1.0).is_err());
        assert!(sample_stable_increment(1.5, 0.0, 1.0, 0.0, 1.0).is_err());
        assert!(sample_stable_increment(1.5, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(sample_stable_increment(1.5, 0.0, 1.0, 0.3, 0.0).is_err());
        assert!(sample_stable_increment(1.5, 0.0, -1.0, 0.3, 1.0).is_err());
    }

    #[test]
    fn stable_self_similarity_is_bit_exact() {
        for &(alpha, beta) in &[(1.5, 0.0), (0.7, 1.0), (1.2, -0.4), (1.0, 0.0), (1.9, 0.9)] {
            for &(u, w) in &[(0.1, 0.3), (0.5, 1.0), (0.93, 2.5), (0.31, 0.01)] {
                for &dt in &[1e-3, 0.25, 1.0, 7.0] {
                    let unit = sample_stable_increment(alpha, beta, 1.0, u, w).unwrap();
                    let scaled = sample_stable_increment(alpha, beta, dt, u, w).unwrap();
                    assert_eq!(scaled, f64::powf(dt, 1.0 / alpha) * unit);
                }
            }
        }
    }

    #[test]
    fn symmetric_stable_median_is_zero() {
        let law = StableLaw::new(1.99, 0.0).unwrap();
        let mut rng = stream(11, 0, Purpose::Path);
        let n = 100_000;
        let below = (0..n).filter(|_| law.sample(&mut rng) < 0.0).count() as f64;
        // binomial standard error of the fraction below the median
        let se = (0.25 / n as f64).sqrt();
        assert!((below / n as f64 - 0.5).abs() < 3.0 * se, "{below}");
    }

    #[test]
    fn one_sided_stable_is_non_negative() {
        let law = StableLaw::new(0.7, 1.0).unwrap();
        let mut rng = stream(5, 0, Purpose::Path);
        assert!((0..100_000).all(|_| law.sample(&mut rng) >= 0.0));
        let law = StableLaw::new(0.7, -1.0).unwrap();
        assert!((0..100_000).all(|_| law.sample(&mut rng) <= 0.0));
    }

    #[test]
    fn scaling_examples() {
        let bm = LevyModel::brownian(-0.5, 2.0).unwrap();
        let a = bm.scaling(1.0 / 50_000.0).unwrap();
        assert!(close(a, (2.0f64 / 50_000.0).sqrt(), 1e-16));
        assert!(close(a, 0.0063246, 1e-7));
        let st = LevyModel::stable(1.3, 0.2, 2.5).unwrap();
        assert_eq!(st.scaling(1.0).unwrap(), 2.5);
        let st = LevyModel::stable(1.5, 0.0, 1.0).unwrap();
        assert!(close(st.scaling(1e-3).unwrap(), 1e-2, 1e-15));
        assert!(bm.scaling(0.0).is_err());
    }

    #[test]
    fn scaling_is_regularly_varying() {
        let models = [
            LevyModel::brownian(0.3, 1.7).unwrap(),
            LevyModel::stable(0.6, 1.0, 2.0).unwrap(),
            LevyModel::stable(1.4, -0.3, 0.5).unwrap(),
            LevyModel::drift(-3.0).unwrap(),
        ];
        for model in models {
            let alpha = model.index();
            for &eps in &[1e-6, 1e-3, 0.1] {
                for &k in &[0.5, 2.0, 10.0] {
                    let ratio = model.scaling(k * eps).unwrap() / model.scaling(eps).unwrap();
                    let expected = f64::powf(k, 1.0 / alpha);
                    assert!(((ratio - expected) / expected).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn regularity_examples() {
        let both = RegularityFlags { regular_up: true, regular_down: true };
        assert_eq!(LevyModel::brownian(1.0, 1.0).unwrap().regularity(), both);
        assert_eq!(LevyModel::stable(1.2, 1.0, 1.0).unwrap().regularity(), both);
        assert_eq!(LevyModel::stable(0.5, 0.3, 1.0).unwrap().regularity(), both);
        assert_eq!(
            LevyModel::stable(0.7, 1.0, 1.0).unwrap().regularity(),
            RegularityFlags { regular_up: true, regular_down: false }
        );
        assert_eq!(
            LevyModel::stable(0.7, -1.0, 1.0).unwrap().regularity(),
            RegularityFlags { regular_up: false, regular_down: true }
        );
        assert_eq!(
            LevyModel::drift(-1.0).unwrap().regularity(),
            RegularityFlags { regular_up: false, regular_down: true }
        );
        assert!(LevyModel::drift(2.0).unwrap().is_monotone());
        assert!(!LevyModel::stable(1.5, 1.0, 1.0).unwrap().is_monotone());
    }

    #[test]
    fn alpha_two_routes_to_brownian() {
        let m = LevyModel::stable(2.0, 0.7, 3.0).unwrap();
        assert_eq!(m, LevyModel::Brownian { mu: 0.0, sigma2: 18.0 });
    }

    #[test]
    fn invalid_models_are_rejected() {
        assert!(LevyModel::brownian(0.0, 0.0).is_err());
        assert!(LevyModel::drift(0.0).is_err());
        assert!(LevyModel::stable(1.0, 0.2, 1.0).is_err());
        assert!(LevyModel::stable(1.5, 0.0, 0.0).is_err());
        assert!(LevyModel::stable(2.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn brownian_increment_variance() {
        let sampler = LevyModel::brownian(0.0, 2.0).unwrap().increment_sampler(1.0).unwrap();
        let mut rng = stream(3, 0, Purpose::Path);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| sampler.draw(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // Var of the sample variance for a normal law is 2σ⁴/(n−1)
        let se = (2.0 * 4.0 / (n - 1) as f64).sqrt();
        assert!((var - 2.0).abs() < 3.0 * se, "{var}");
    }

    #[test]
    fn config_syntax_parses() {
        #[derive(Deserialize)]
        struct Wrap {
            model: LevyModel<f64>,
        }
        let w: Wrap = toml::from_str(r#"model = { kind = "brownian", mu = -0.5, sigma2 = 2.0 }"#).unwrap();
        assert_eq!(w.model, LevyModel::Brownian { mu: -0.5, sigma2: 2.0 });
        let w: Wrap =
            toml::from_str(r#"model = { kind = "stable", alpha = 1.5, beta = 0.0, scale = 1.0 }"#).unwrap();
        assert_eq!(w.model, LevyModel::StrictlyStable { alpha: 1.5, beta: 0.0, scale: 1.0 });
        let w: Wrap = toml::from_str(r#"model = { kind = "drift", slope = -1.0 }"#).unwrap();
        assert_eq!(w.model, LevyModel::Drift { slope: -1.0 });
    }

    #[test]
    fn generic_over_f32() {
        let m = LevyModel::<f32>::stable(1.5, 0.0, 1.0).unwrap();
        assert!((m.scaling(1e-3).unwrap() - 1e-2).abs() < 1e-6);
        let x = sample_stable_increment::<f32>(1.0, 0.0, 1.0, 0.75, 1.0).unwrap();
        assert!((x - 1.0).abs() < 1e-6);
    }
}
