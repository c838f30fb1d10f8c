//! Closed real intervals and the arithmetic the bounding sheet is built
//! from.
//!
//! Endpoints are plain `f64`s with round-to-nearest arithmetic; no outward
//! rounding is applied. Consumers compare with a relative tolerance instead
//! (see [`membership_tolerance`]).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("interval endpoint overflowed the finite range")]
    Overflow,
    #[error("divisor interval contains zero")]
    DivisorStraddlesZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("invalid interval [{lo}, {hi}]")]
pub struct InvalidInterval {
    pub lo: f64,
    pub hi: f64,
}

/// `[lo, hi]` with `lo <= hi`, both finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 2]", try_from = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

// Fallible, so not the std operator traits.
#[allow(clippy::should_implement_trait)]
impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, InvalidInterval> {
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(InvalidInterval { lo, hi })
        }
    }

    /// The width-zero interval `[v, v]`.
    ///
    /// # Panics
    ///
    /// If `v` is not finite.
    pub fn degenerate(v: f64) -> Self {
        assert!(v.is_finite(), "degenerate interval of non-finite value");
        Self { lo: v, hi: v }
    }

    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// Exact membership, no tolerance.
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// `v ∈ [lo - ε, hi + ε]` with ε from [`membership_tolerance`].
    pub fn contains_approx(&self, v: f64) -> bool {
        let eps = membership_tolerance(self.lo.abs().max(self.hi.abs()));
        self.lo - eps <= v && v <= self.hi + eps
    }

    /// Whether the two intervals share a point, up to the same tolerance.
    pub fn intersects_approx(&self, other: &Interval) -> bool {
        let scale = self
            .lo
            .abs()
            .max(self.hi.abs())
            .max(other.lo.abs())
            .max(other.hi.abs());
        let eps = membership_tolerance(scale);
        self.lo <= other.hi + eps && other.lo <= self.hi + eps
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    fn checked(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_finite() && hi.is_finite() {
            Ok(Self { lo, hi })
        } else {
            Err(IntervalError::Overflow)
        }
    }

    fn hull4(p: [f64; 4]) -> Result<Self, IntervalError> {
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::checked(lo, hi)
    }

    pub fn add(self, rhs: Interval) -> Result<Self, IntervalError> {
        Self::checked(self.lo + rhs.lo, self.hi + rhs.hi)
    }

    pub fn sub(self, rhs: Interval) -> Result<Self, IntervalError> {
        self.add(rhs.neg())
    }

    pub fn neg(self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn mul(self, rhs: Interval) -> Result<Self, IntervalError> {
        Self::hull4([
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ])
    }

    /// `self × [1/rhs.hi, 1/rhs.lo]`, evaluated as the hull of the four
    /// endpoint quotients so that degenerate operands divide exactly.
    pub fn div(self, rhs: Interval) -> Result<Self, IntervalError> {
        if rhs.lo <= 0.0 && 0.0 <= rhs.hi {
            return Err(IntervalError::DivisorStraddlesZero);
        }
        Self::hull4([
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ])
    }

    /// Componentwise sum; `[0, 0]` for no items.
    pub fn sum<I: IntoIterator<Item = Interval>>(items: I) -> Result<Self, IntervalError> {
        items.into_iter().try_fold(Self::ZERO, Self::add)
    }
}

/// Absolute slack for membership tests at magnitude `scale`:
/// `1e-9 · max(1, scale)`.
pub fn membership_tolerance(scale: f64) -> f64 {
    1e-9 * scale.max(1.0)
}

pub fn interval_add(a: Interval, b: Interval) -> Result<Interval, IntervalError> {
    a.add(b)
}

pub fn interval_sub(a: Interval, b: Interval) -> Result<Interval, IntervalError> {
    a.sub(b)
}

pub fn interval_mul(a: Interval, b: Interval) -> Result<Interval, IntervalError> {
    a.mul(b)
}

pub fn interval_neg(a: Interval) -> Interval {
    a.neg()
}

pub fn interval_div(a: Interval, b: Interval) -> Result<Interval, IntervalError> {
    a.div(b)
}

pub fn interval_sum(items: &[Interval]) -> Result<Interval, IntervalError> {
    Interval::sum(items.iter().copied())
}

/// Rendered as `[lo:hi]`.
impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.lo, self.hi)
    }
}

impl From<Interval> for [f64; 2] {
    fn from(iv: Interval) -> Self {
        [iv.lo, iv.hi]
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = InvalidInterval;

    fn try_from([lo, hi]: [f64; 2]) -> Result<Self, Self::Error> {
        Interval::new(lo, hi)
    }
}
