//! Discrete two-sided Skorokhod map on `[0, 1]` over the unit horizon.
//!
//! A skeleton with `n` increments `ξ_i` is reflected by the recursion
//! `y_i = max(0, min(1, y_{i−1} + ξ_i))`, with regulators `L` (lower barrier)
//! and `U` (upper barrier) absorbing the clipped overshoot so that
//! `y_i = x0 + Σ_{j≤i} ξ_j + L_i − U_i`.
//!
//! [`TwoSidedReflector`] runs the recursion one increment at a time and keeps
//! only O(1) state, which is what the experiments use for long fine paths.
//! [`reflect_two_sided`] additionally records the full trajectories.
//!
//! Everything here is generic over [`Scalar`], so the map can be evaluated
//! exactly on rationals as well as on floats.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::scalar::Scalar;

/// Increments of the driving process on the uniform grid `i/n`, `i = 1..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonPath<T> {
    increments: Vec<T>,
}

impl<T: Scalar> SkeletonPath<T> {
    pub fn new(increments: Vec<T>) -> Result<Self> {
        ensure!(!increments.is_empty(), "a skeleton needs at least one increment");
        Ok(Self { increments })
    }

    /// Grid resolution `n`.
    pub fn resolution(&self) -> usize {
        self.increments.len()
    }

    pub fn increments(&self) -> &[T] {
        &self.increments
    }

    /// `X^{(n)}_n`, summed left to right.
    pub fn terminal(&self) -> T {
        self.increments.iter().fold(T::zero(), |acc, &x| acc + x)
    }

    /// Cumulative values `X^{(n)}_0 = 0, …, X^{(n)}_n`.
    pub fn cumulative(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.increments.len() + 1);
        let mut acc = T::zero();
        out.push(acc);
        for &x in &self.increments {
            acc += x;
            out.push(acc);
        }
        out
    }

    /// The mirrored path `−X`.
    pub fn negated(&self) -> Self {
        Self {
            increments: self.increments.iter().map(|&x| T::zero() - x).collect(),
        }
    }

    /// Sums consecutive blocks of `block` fine increments, left to right.
    ///
    /// The coarse path ends at the same point as the fine one.
    pub fn coarsen(&self, block: usize) -> Result<Self> {
        ensure!(block >= 1, "block size must be positive");
        ensure!(
            self.increments.len().is_multiple_of(block),
            "block size {block} does not divide resolution {}",
            self.increments.len()
        );
        let increments = self
            .increments
            .chunks_exact(block)
            .map(|chunk| chunk.iter().fold(T::zero(), |acc, &x| acc + x))
            .collect();
        Ok(Self { increments })
    }
}

/// Which barrier a regulator increase happened at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Barrier {
    Lower,
    Upper,
}

/// How regulators and the path sum are accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Summation {
    #[default]
    Plain,
    /// Kahan compensated summation.
    Compensated,
}

#[derive(Debug, Clone, Copy)]
struct RunningSum<T> {
    sum: T,
    carry: T,
    compensated: bool,
}

impl<T: Scalar> RunningSum<T> {
    fn new(mode: Summation) -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
            compensated: mode == Summation::Compensated,
        }
    }

    #[inline]
    fn add(&mut self, x: T) {
        if self.compensated {
            let y = x - self.carry;
            let t = self.sum + y;
            self.carry = (t - self.sum) - y;
            self.sum = t;
        } else {
            self.sum += x;
        }
    }
}

/// Terminal state of a reflected skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionSummary<T> {
    /// Initial position.
    pub x0: T,
    /// Grid resolution.
    pub n: usize,
    /// Terminal position `y_n`.
    pub y_n: T,
    /// Terminal lower regulator `L_n`.
    pub l_n: T,
    /// Terminal upper regulator `U_n`.
    pub u_n: T,
    /// `Σ ξ_i`.
    pub increment_sum: T,
    /// Last index at which `L` increased, 0 if never.
    pub rho_l: usize,
    /// Last index at which `U` increased, 0 if never.
    pub rho_u: usize,
    /// Number of alternating barrier switches, counting the first increase.
    pub switches: usize,
    /// Whether the S-event holds for the trajectory.
    pub s_event: bool,
}

impl<T: Scalar> ReflectionSummary<T> {
    /// Barrier whose regulator increased last, if any did.
    pub fn last_barrier(&self) -> Option<Barrier> {
        use std::cmp::Ordering::*;
        match self.rho_l.cmp(&self.rho_u) {
            Greater => Some(Barrier::Lower),
            Less => Some(Barrier::Upper),
            Equal => None,
        }
    }

    /// `x0 + Σξ + L_n − U_n − y_n`; zero up to rounding.
    pub fn identity_residual(&self) -> T {
        self.x0 + self.increment_sum + self.l_n - self.u_n - self.y_n
    }
}

/// Full trajectories plus the terminal summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionOutcome<T> {
    pub summary: ReflectionSummary<T>,
    /// `y_0 … y_n`
    pub y: Vec<T>,
    /// `L_0 … L_n`
    pub l: Vec<T>,
    /// `U_0 … U_n`
    pub u: Vec<T>,
}

/// One step of the recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step<T> {
    pub y: T,
    pub dl: T,
    pub du: T,
}

/// Streaming evaluator of the two-sided map.
#[derive(Debug, Clone)]
pub struct TwoSidedReflector<T> {
    x0: T,
    y: T,
    step: usize,
    l: RunningSum<T>,
    u: RunningSum<T>,
    sum: RunningSum<T>,
    rho_l: usize,
    rho_u: usize,
    switches: usize,
    last: Option<Barrier>,
    s_event: SEventTracker,
}

impl<T: Scalar> TwoSidedReflector<T> {
    pub fn new(x0: T) -> Result<Self> {
        Self::with_summation(x0, Summation::Plain)
    }

    pub fn with_summation(x0: T, summation: Summation) -> Result<Self> {
        ensure!(
            x0 >= T::zero() && x0 <= T::one(),
            "initial position must lie in [0, 1], got {x0:?}"
        );
        Ok(Self {
            x0,
            y: x0,
            step: 0,
            l: RunningSum::new(summation),
            u: RunningSum::new(summation),
            sum: RunningSum::new(summation),
            rho_l: 0,
            rho_u: 0,
            switches: 0,
            last: None,
            s_event: SEventTracker::new(x0 == T::zero()),
        })
    }

    /// Current position.
    pub fn position(&self) -> T {
        self.y
    }

    /// Advances by one increment.
    #[inline]
    pub fn push(&mut self, xi: T) -> Step<T> {
        self.step += 1;
        self.sum.add(xi);
        let proposal = self.y + xi;
        let zero = T::zero();
        let one = T::one();
        let (y, dl, du) = if proposal < zero {
            (zero, zero - proposal, zero)
        } else if proposal > one {
            (one, zero, proposal - one)
        } else {
            (proposal, zero, zero)
        };
        if dl > zero {
            self.l.add(dl);
            self.rho_l = self.step;
            self.register(Barrier::Lower);
        } else if du > zero {
            self.u.add(du);
            self.rho_u = self.step;
            self.register(Barrier::Upper);
        }
        self.y = y;
        self.s_event.observe(self.step, y == zero, y == one);
        Step { y, dl, du }
    }

    #[inline]
    fn register(&mut self, barrier: Barrier) {
        if self.last != Some(barrier) {
            self.switches += 1;
            self.last = Some(barrier);
        }
    }

    pub fn summary(&self) -> ReflectionSummary<T> {
        ReflectionSummary {
            x0: self.x0,
            n: self.step,
            y_n: self.y,
            l_n: self.l.sum,
            u_n: self.u.sum,
            increment_sum: self.sum.sum,
            rho_l: self.rho_l,
            rho_u: self.rho_u,
            switches: self.switches,
            s_event: self.s_event.holds(self.step),
        }
    }
}

/// Online version of [`detect_s_event`].
#[derive(Debug, Clone, Copy)]
struct SEventTracker {
    prev_zero: bool,
    /// Index of an unresolved 0 → 1 jump.
    pending: Option<usize>,
    violated: bool,
}

impl SEventTracker {
    fn new(start_at_zero: bool) -> Self {
        Self {
            prev_zero: start_at_zero,
            pending: None,
            violated: false,
        }
    }

    #[inline]
    fn observe(&mut self, step: usize, at_zero: bool, at_one: bool) {
        if self.pending.is_some() {
            if at_one {
                self.pending = None;
            } else if at_zero {
                self.violated = true;
                self.pending = None;
            }
        }
        if self.prev_zero && at_one {
            self.pending = Some(step);
        }
        self.prev_zero = at_zero;
    }

    fn holds(&self, n: usize) -> bool {
        let unresolved = matches!(self.pending, Some(i) if i < n);
        !(self.violated || unresolved)
    }
}

/// Reflects `path` from `x0`, recording the full trajectories.
pub fn reflect_two_sided<T: Scalar>(x0: T, path: &SkeletonPath<T>) -> Result<ReflectionOutcome<T>> {
    reflect_two_sided_with(x0, path, Summation::Plain)
}

pub fn reflect_two_sided_with<T: Scalar>(
    x0: T,
    path: &SkeletonPath<T>,
    summation: Summation,
) -> Result<ReflectionOutcome<T>> {
    let mut reflector = TwoSidedReflector::with_summation(x0, summation)?;
    let n = path.resolution();
    let mut y = Vec::with_capacity(n + 1);
    let mut l = Vec::with_capacity(n + 1);
    let mut u = Vec::with_capacity(n + 1);
    y.push(x0);
    l.push(T::zero());
    u.push(T::zero());
    for &xi in path.increments() {
        let step = reflector.push(xi);
        y.push(step.y);
        l.push(*l.last().expect("non-empty") + step.dl);
        u.push(*u.last().expect("non-empty") + step.du);
    }
    Ok(ReflectionOutcome {
        summary: reflector.summary(),
        y,
        l,
        u,
    })
}

/// Reflects `path` from `x0`, keeping only the terminal summary.
pub fn reflect_terminal<T: Scalar>(
    x0: T,
    path: &SkeletonPath<T>,
    summation: Summation,
) -> Result<ReflectionSummary<T>> {
    let mut reflector = TwoSidedReflector::with_summation(x0, summation)?;
    for &xi in path.increments() {
        reflector.push(xi);
    }
    Ok(reflector.summary())
}

/// Evaluates the S-event directly from a trajectory `y_0 … y_n`: true iff
/// there is no `i ∈ [1, n−1]` with `y_{i−1} = 0`, `y_i = 1` and `y_j < 1` for
/// all `j ∈ [i+1, n_i]`, where `n_i` is the first `j > i` with `y_j = 0`, or `n`.
pub fn detect_s_event<T: Scalar>(y: &[T]) -> bool {
    let zero = T::zero();
    let one = T::one();
    let n = match y.len() {
        0 => return true,
        len => len - 1,
    };
    for i in 1..n {
        if !(y[i - 1] == zero && y[i] == one) {
            continue;
        }
        let n_i = (i + 1..=n).find(|&j| y[j] == zero || j == n).unwrap_or(n);
        if (i + 1..=n_i).all(|j| y[j] < one) {
            return false;
        }
    }
    true
}

/// One-sided reflection at 0 started from 0: `X_i − min_{j≤i} X_j` for `i = 0..n`.
pub fn reflect_one_sided<T: Scalar>(path: &SkeletonPath<T>) -> Vec<T> {
    let mut running_min = T::zero();
    path.cumulative()
        .into_iter()
        .map(|x| {
            if x < running_min {
                running_min = x;
            }
            x - running_min
        })
        .collect()
}
