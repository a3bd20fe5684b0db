//! Gamma and Riemann zeta on the ranges the moment formulas need.

use crate::error::{ensure, Result};
use crate::scalar::Real;

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for real `x`, using reflection below 1/2. Poles return NaN.
pub fn gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        if x == x.floor() {
            return T::nan();
        }
        // Γ(x)Γ(1−x) = π / sin(πx)
        return T::PI() / ((T::PI() * x).sin() * gamma(T::one() - x));
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += T::lit(c) / (x + T::from_count(i));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    T::lit(2.0 * std::f64::consts::PI).sqrt() * t.powf(x + half) * (-t).exp() * acc
}

const ETA_TERMS: usize = 40;

/// Dirichlet eta `η(s) = Σ_{k≥1} (−1)^{k−1} k^{−s}` for `s > 0`, summed with
/// the Cohen–Villegas–Zagier acceleration.
pub fn dirichlet_eta<T: Real>(s: T) -> T {
    let n = ETA_TERMS;
    let d = (T::lit(3.0) + T::lit(8.0).sqrt()).powi(n as i32);
    let d = (d + d.recip()) / T::lit(2.0);
    let mut b = -T::one();
    let mut c = -d;
    let mut sum = T::zero();
    for k in 0..n {
        c = b - c;
        sum += c * T::from_count(k + 1).powf(-s);
        let kf = T::from_count(k);
        let nf = T::from_count(n);
        b = (kf + nf) * (kf - nf) * b / ((kf + T::lit(0.5)) * (kf + T::one()));
    }
    sum / d
}

/// Riemann ζ(s) for `s ∈ (0, 1)` via `ζ(s) = η(s) / (1 − 2^{1−s})`.
pub fn riemann_zeta_unit_interval<T: Real>(s: T) -> Result<T> {
    ensure!(
        s > T::zero() && s < T::one(),
        "zeta is provided on (0, 1) only, got {s}"
    );
    Ok(dirichlet_eta(s) / (T::one() - T::lit(2.0).powf(T::one() - s)))
}
