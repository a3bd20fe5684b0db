//! Closed-form expectations for the limit law `V` of strictly stable and
//! Brownian zoomed-in processes, in unit-scale normalization.
//!
//! `E X̂₁⁺` uses Zolotarev's formula; `E V_n` follows from Spitzer's identity
//! and self-similarity; `E V` is its limit `−ζ((α−1)/α) E X̂₁⁺`. At `α = 2` the
//! unit process is standard Brownian motion.

use serde::Serialize;

use crate::error::{ensure, Result};
use crate::scalar::Real;
use crate::special::{gamma, riemann_zeta_unit_interval};

/// Validated `(α, β)` with the positivity parameter `ρ = P(X̂₁ > 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableMomentInputs<T> {
    pub alpha: T,
    pub beta: T,
    pub rho: T,
}

impl<T: Real> StableMomentInputs<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        ensure!(
            alpha > T::one() && alpha <= T::lit(2.0),
            "moments need alpha in (1, 2], got {alpha}"
        );
        ensure!(
            beta >= -T::one() && beta <= T::one(),
            "skewness must lie in [-1, 1], got {beta}"
        );
        Ok(Self {
            alpha,
            beta,
            rho: positivity(alpha, beta),
        })
    }
}

/// `ρ = 1/2 + arctan(β tan(π(α−2)/2)) / (πα)`; exactly 1/2 at α = 2 or β = 0.
pub fn positivity<T: Real>(alpha: T, beta: T) -> T {
    let half = T::lit(0.5);
    if alpha == T::lit(2.0) || beta == T::zero() {
        return half;
    }
    let pi = T::PI();
    half + (beta * (pi * (alpha - T::lit(2.0)) / T::lit(2.0)).tan()).atan() / (pi * alpha)
}

/// `E X̂₁⁺` for the unit-scale strictly stable law (standard normal at α = 2).
pub fn expected_positive_part<T: Real>(alpha: T, beta: T) -> Result<T> {
    let inputs = StableMomentInputs::new(alpha, beta)?;
    let pi = T::PI();
    if alpha == T::lit(2.0) {
        return Ok((T::lit(2.0) * pi).sqrt().recip());
    }
    let rho = inputs.rho;
    let denom = pi * (pi * alpha * (rho - T::lit(0.5))).cos().abs().powf(alpha.recip());
    Ok((pi * rho).sin() * gamma(T::one() - alpha.recip()) / denom)
}

/// Limit `E V = −ζ((α−1)/α) E X̂₁⁺`.
pub fn expected_v<T: Real>(alpha: T, beta: T) -> Result<T> {
    let positive = expected_positive_part(alpha, beta)?;
    let zeta = riemann_zeta_unit_interval((alpha - T::one()) / alpha)?;
    Ok(-zeta * positive)
}

/// `E V_n = (α n^{1/α} − Σ_{k=1}^n k^{1/α−1}) E X̂₁⁺`, the mean gap between the
/// supremum over `[0, n]` and the maximum over the integers `0..=n`.
pub fn expected_vn<T: Real>(alpha: T, beta: T, n: usize) -> Result<T> {
    ensure!(n >= 1, "n must be positive");
    let positive = expected_positive_part(alpha, beta)?;
    let exponent = alpha.recip() - T::one();
    // smallest terms first
    let partial = (1..=n)
        .rev()
        .fold(T::zero(), |acc, k| acc + T::from_count(k).powf(exponent));
    Ok((alpha * T::from_count(n).powf(alpha.recip()) - partial) * positive)
}

/// Exact mean of the nested-grid statistic `max_{i≤mn} X̂_{i/m} − max_{i≤n} X̂_i`,
/// namely `E V_n − m^{−1/α} E V_{mn}`.
pub fn nested_grid_mean<T: Real>(alpha: T, beta: T, m: usize, n: usize) -> Result<T> {
    ensure!(m >= 1, "m must be positive");
    let coarse = expected_vn(alpha, beta, n)?;
    let fine = expected_vn(alpha, beta, m * n)?;
    Ok(coarse - T::from_count(m).powf(-alpha.recip()) * fine)
}

/// Everything the `moments` command reports for one `(α, β)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentTable {
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub expected_positive_part: f64,
    pub expected_v: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_vn: Option<f64>,
}

impl MomentTable {
    pub fn new(alpha: f64, beta: f64, n: Option<usize>) -> Result<Self> {
        let inputs = StableMomentInputs::new(alpha, beta)?;
        let expected_vn = n.map(|n| expected_vn(alpha, beta, n)).transpose()?;
        Ok(Self {
            alpha,
            beta,
            rho: inputs.rho,
            expected_positive_part: expected_positive_part(alpha, beta)?,
            expected_v: expected_v(alpha, beta)?,
            n,
            expected_vn,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expected_positive_part(alpha: f64, beta: f64) -> Result<f64> {
        super::expected_positive_part(alpha, beta)
    }

    fn expected_v(alpha: f64, beta: f64) -> Result<f64> {
        super::expected_v(alpha, beta)
    }

    fn expected_vn(alpha: f64, beta: f64, n: usize) -> Result<f64> {
        super::expected_vn(alpha, beta, n)
    }

    // Reference values below were computed with 30-digit arithmetic.
    const EV_BROWNIAN: f64 = 0.582_597_157_939_010_7;
    const EV_STABLE_15: f64 = 0.830_016_034_854_177_9;

    #[test]
    fn positive_part_examples() {
        let sym = expected_positive_part(1.5, 0.0).unwrap();
        assert!((sym - gamma(1.0 / 3.0) / std::f64::consts::PI).abs() < 1e-14);
        assert!((sym - 0.852_732_620_076_194).abs() < 1e-12);
        let gauss = expected_positive_part(2.0, 0.0).unwrap();
        assert!((gauss - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!((gauss - 0.398942).abs() < 1e-6);
    }

    #[test]
    fn one_sided_specialization() {
        let alpha: f64 = 1.5;
        let rho: f64 = positivity(alpha, 1.0);
        assert!((rho - 1.0 / 3.0).abs() < 1e-15);
        let pi = std::f64::consts::PI;
        let closed = (pi / alpha).sin() * gamma(1.0 - 1.0 / alpha)
            / (pi * (pi * alpha / 2.0).cos().abs().powf(1.0 / alpha));
        for beta in [1.0, -1.0] {
            let general = expected_positive_part(alpha, beta).unwrap();
            assert!((general - closed).abs() < 1e-13, "{beta}: {general} vs {closed}");
        }
        assert!((closed - 0.930_436_716_929_229_4).abs() < 1e-12);
    }

    #[test]
    fn expected_v_examples() {
        assert!((expected_v(2.0, 0.0).unwrap() - EV_BROWNIAN).abs() < 1e-12);
        assert!((expected_v(1.5, 0.0).unwrap() - EV_STABLE_15).abs() < 1e-12);
        let composed = 0.973_360_248_350_782_7 * 0.852_732_620_076_194;
        assert!((expected_v(1.5, 0.0).unwrap() - composed).abs() < 1e-12);
        let near_one = expected_v(1.01, 0.0).unwrap();
        let closer = expected_v(1.001, 0.0).unwrap();
        assert!(near_one.is_finite() && closer.is_finite());
        assert!(closer > near_one && near_one > expected_v(1.1, 0.0).unwrap());
        assert!(expected_v(1.0, 0.0).is_err());
        assert!(expected_v(0.5, 1.0).is_err());
    }

    #[test]
    fn expected_v_sign_symmetry() {
        for &alpha in &[1.05, 1.2, 1.5, 1.8, 1.99] {
            for &beta in &[0.1, 0.5, 0.9, 1.0] {
                let plus = expected_v(alpha, beta).unwrap();
                let minus = expected_v(alpha, -beta).unwrap();
                assert!((plus - minus).abs() < 1e-12, "{alpha} {beta}");
                let rho_sum: f64 = positivity(alpha, beta) + positivity(alpha, -beta);
                assert!((rho_sum - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn expected_vn_examples() {
        for &(alpha, beta) in &[(1.5, 0.0), (1.3, 0.7), (2.0, 0.0)] {
            let one = expected_vn(alpha, beta, 1).unwrap();
            let positive = expected_positive_part(alpha, beta).unwrap();
            assert!((one - (alpha - 1.0) * positive).abs() < 1e-14);
        }
        let far = expected_vn(2.0, 0.0, 1_000_000).unwrap();
        assert!((far - EV_BROWNIAN).abs() < 1e-3);
        assert!((far - 0.582_397_686_815_432_5).abs() < 1e-10);
        assert!((expected_vn(1.5, 0.0, 100).unwrap() - 0.738_209_229_820_490_9).abs() < 1e-12);
        assert!(expected_vn(1.5, 0.0, 0).is_err());
    }

    #[test]
    fn expected_vn_increases_to_limit() {
        for &(alpha, beta) in &[(2.0, 0.0), (1.5, 0.0), (1.2, 0.5)] {
            let limit = expected_v(alpha, beta).unwrap();
            let mut prev = 0.0;
            for e in 0..=6 {
                let value = expected_vn(alpha, beta, 10usize.pow(e)).unwrap();
                assert!(value > prev && value < limit, "{alpha} n=10^{e}");
                prev = value;
            }
        }
    }

    #[test]
    fn nested_grid_mean_reference() {
        let exact: f64 = nested_grid_mean(1.5, 0.0, 100, 100).unwrap();
        assert!((exact - 0.700_601_871_495_297_6).abs() < 1e-11);
        assert_eq!(nested_grid_mean(1.5f64, 0.0, 1, 100).unwrap(), 0.0);
    }

    #[test]
    fn all_outputs_positive_and_finite() {
        for i in 1..=20 {
            let alpha = 1.0 + i as f64 * 0.05;
            for j in -4..=4 {
                let beta = j as f64 * 0.25;
                let t = MomentTable::new(alpha, beta, Some(50)).unwrap();
                for v in [t.rho, t.expected_positive_part, t.expected_v, t.expected_vn.unwrap()] {
                    assert!(v.is_finite() && v > 0.0, "{alpha} {beta}");
                }
            }
        }
    }
}
