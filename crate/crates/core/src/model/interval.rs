use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` with `lo < hi`.
///
/// Serializes as a two-element array.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(Error::DegenerateInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// `[-1, 1]`, the reference interval of all normalized computations.
    pub const fn unit() -> Self {
        Self { lo: -1.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Affine map onto `[-1, 1]`: `(2x - a - b) / (b - a)`.
    #[inline]
    pub fn normalize(&self, x: f64) -> f64 {
        (2.0 * x - self.lo - self.hi) / (self.hi - self.lo)
    }

    /// Inverse of [`Interval::normalize`].
    #[inline]
    pub fn denormalize(&self, t: f64) -> f64 {
        0.5 * ((self.hi - self.lo) * t + self.lo + self.hi)
    }

    pub fn normalize_all(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.normalize(x)).collect()
    }

    /// `count` equally spaced points including both endpoints.
    pub fn linspace(&self, count: usize) -> Vec<f64> {
        linspace(self.lo, self.hi, count)
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from([lo, hi]: [f64; 2]) -> Result<Self> {
        Interval::new(lo, hi)
    }
}

impl From<Interval> for [f64; 2] {
    fn from(iv: Interval) -> Self {
        [iv.lo, iv.hi]
    }
}

/// `count` equally spaced points from `lo` to `hi` inclusive. A single point
/// sits at the midpoint.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            let mut out: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
            out[count - 1] = hi;
            out
        }
    }
}
