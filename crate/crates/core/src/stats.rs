//! Empirical distribution utilities: ECDF, two-sample Kolmogorov–Smirnov,
//! Gaussian kernel density estimation and Monte Carlo summaries.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{ensure, Result};
use crate::scalar::Real;

fn sorted<T: Real>(xs: &[T]) -> Vec<T> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v
}

/// Empirical CDF of a finite sample.
#[derive(Debug, Clone)]
pub struct Ecdf<T> {
    sorted: Vec<T>,
}

impl<T: Real> Ecdf<T> {
    pub fn new(samples: &[T]) -> Result<Self> {
        ensure!(!samples.is_empty(), "ecdf needs at least one sample");
        ensure!(samples.iter().all(|x| !x.is_nan()), "samples contain NaN");
        Ok(Self { sorted: sorted(samples) })
    }

    /// Fraction of samples `≤ x`.
    pub fn eval(&self, x: T) -> T {
        let count = self.sorted.partition_point(|&s| s <= x);
        T::from_count(count) / T::from_count(self.sorted.len())
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[T] {
        &self.sorted
    }
}

/// Two-sample Kolmogorov–Smirnov statistic `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_two_sample<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    ensure!(!a.is_empty() && !b.is_empty(), "ks needs two non-empty samples");
    ensure!(
        a.iter().chain(b).all(|x| !x.is_nan()),
        "samples contain NaN"
    );
    let a = sorted(a);
    let b = sorted(b);
    let (na, nb) = (T::from_count(a.len()), T::from_count(b.len()));
    let (mut i, mut j) = (0, 0);
    let mut sup = T::zero();
    while i < a.len() && j < b.len() {
        // step past every sample equal to the next jump point
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        let gap = (T::from_count(i) / na - T::from_count(j) / nb).abs();
        if gap > sup {
            sup = gap;
        }
    }
    Ok(sup)
}

/// Asymptotic two-sample KS critical value `c(level) √((n+m)/(nm))`, with
/// `c(level) = √(−ln(level/2)/2)`.
pub fn ks_critical_value(level: f64, n: usize, m: usize) -> f64 {
    let c = (-(level / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Nearest-rank quantile of an already sorted sample: `x_(⌈p·n⌉)`.
pub fn quantile_sorted<T: Real>(sorted: &[T], p: f64) -> Result<T> {
    ensure!(!sorted.is_empty(), "quantile of an empty sample");
    ensure!((0.0..=1.0).contains(&p), "quantile level must lie in [0, 1], got {p}");
    let rank = (p * sorted.len() as f64).ceil() as usize;
    Ok(sorted[rank.clamp(1, sorted.len()) - 1])
}

/// Nearest-rank quantile.
pub fn quantile<T: Real>(samples: &[T], p: f64) -> Result<T> {
    quantile_sorted(&sorted(samples), p)
}

/// Point estimates with a standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McSummary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased (n − 1) standard deviation; 0 for a single sample.
    pub sd: f64,
    pub standard_error: f64,
    pub q01: f64,
    pub q50: f64,
    pub q99: f64,
}

pub fn mc_summary<T: Real>(samples: &[T]) -> Result<McSummary> {
    ensure!(!samples.is_empty(), "summary of an empty sample");
    let xs: Vec<f64> = samples.iter().map(|x| x.as_f64()).collect();
    let count = xs.len();
    let mean = xs.iter().sum::<f64>() / count as f64;
    let sd = if count > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
    } else {
        0.0
    };
    let s = sorted(&xs);
    Ok(McSummary {
        count,
        mean,
        sd,
        standard_error: sd / (count as f64).sqrt(),
        q01: quantile_sorted(&s, 0.01)?,
        q50: quantile_sorted(&s, 0.5)?,
        q99: quantile_sorted(&s, 0.99)?,
    })
}

/// Density values on an ascending grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityGrid<T> {
    pub points: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> DensityGrid<T> {
    /// Trapezoid-rule integral of the values over the points.
    pub fn integral(&self) -> T {
        self.points
            .windows(2)
            .zip(self.values.windows(2))
            .fold(T::zero(), |acc, (x, y)| {
                acc + (x[1] - x[0]) * (y[0] + y[1]) / T::lit(2.0)
            })
    }
}

pub const DEFAULT_GRID_POINTS: usize = 512;

/// Silverman's rule `0.9 · min(sd, IQR/1.34) · n^{−1/5}`. Falls back to the
/// standard deviation when the interquartile range vanishes.
pub fn silverman_bandwidth<T: Real>(samples: &[T]) -> Result<T> {
    ensure!(samples.len() >= 2, "automatic bandwidth needs at least two samples");
    let n = T::from_count(samples.len());
    let mean = samples.iter().fold(T::zero(), |a, &x| a + x) / n;
    let var = samples.iter().fold(T::zero(), |a, &x| a + (x - mean) * (x - mean))
        / (n - T::one());
    let sd = var.sqrt();
    let s = sorted(samples);
    let iqr = quantile_sorted(&s, 0.75)? - quantile_sorted(&s, 0.25)?;
    let spread = if iqr > T::zero() { sd.min(iqr / T::lit(1.34)) } else { sd };
    ensure!(spread > T::zero(), "samples have zero spread");
    Ok(T::lit(0.9) * spread * n.powf(T::lit(-0.2)))
}

/// `count` equispaced points from `lo` to `hi`.
pub fn linear_grid<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::from_count(count - 1);
            (0..count).map(|i| lo + step * T::from_count(i)).collect()
        }
    }
}

/// Grid spanning the sample range padded by four bandwidths.
pub fn default_grid<T: Real>(samples: &[T], bandwidth: T, count: usize) -> Vec<T> {
    let lo = samples.iter().fold(T::infinity(), |a, &x| a.min(x));
    let hi = samples.iter().fold(T::neg_infinity(), |a, &x| a.max(x));
    let pad = T::lit(4.0) * bandwidth;
    linear_grid(lo - pad, hi + pad, count)
}

/// Grid restricted to the sample's `[q_lo, q_hi]` quantile range, for heavy tails.
pub fn quantile_grid<T: Real>(samples: &[T], q_lo: f64, q_hi: f64, count: usize) -> Result<Vec<T>> {
    ensure!(q_lo < q_hi, "quantile range must be increasing");
    let s = sorted(samples);
    Ok(linear_grid(quantile_sorted(&s, q_lo)?, quantile_sorted(&s, q_hi)?, count))
}

/// Gaussian kernel density estimate. Without a bandwidth, Silverman's rule is
/// used; without a grid, [`DEFAULT_GRID_POINTS`] points span the sample range
/// ± 4 bandwidths.
pub fn kde_gaussian<T: Real>(
    samples: &[T],
    bandwidth: Option<T>,
    grid: Option<Vec<T>>,
) -> Result<DensityGrid<T>> {
    ensure!(!samples.is_empty(), "kde needs at least one sample");
    let h = match bandwidth {
        Some(h) => {
            ensure!(h > T::zero(), "bandwidth must be positive, got {h}");
            h
        }
        None => silverman_bandwidth(samples)?,
    };
    let points = grid.unwrap_or_else(|| default_grid(samples, h, DEFAULT_GRID_POINTS));
    ensure!(
        points.windows(2).all(|w| w[0] <= w[1]),
        "grid points must be ascending"
    );
    let norm = (T::lit(2.0) * T::PI()).sqrt() * h * T::from_count(samples.len());
    let values = points
        .iter()
        .map(|&x| {
            samples.iter().fold(T::zero(), |acc, &s| {
                let z = (x - s) / h;
                acc + (-(z * z) / T::lit(2.0)).exp()
            }) / norm
        })
        .collect();
    Ok(DensityGrid { points, values })
}
