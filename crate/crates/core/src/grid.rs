//! Uniform time grids on [0, 1] and the two projections onto them.

use crate::error::{Error, Result};
use crate::offsets::RandomOffsets;
use alloc::format;

/// The grid `{ j/n : j = 0..=n }` on the unit horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeGrid {
    n: usize,
}

impl TimeGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("grid resolution must be at least 1".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// `j / n`; exact whenever `n` is a power of two.
    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        j as f64 / self.n as f64
    }

    /// Refine by an integer factor.
    pub fn refine(&self, q: usize) -> Result<Self> {
        Self::new(self.n * q)
    }
}

/// Left grid projection `⌊ns⌋ / n`.
pub fn kappa(n: usize, s: f64) -> Result<f64> {
    check_n(n)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("time {s} outside [0, 1]")));
    }
    Ok(libm::floor(n as f64 * s) / n as f64)
}

/// Randomised projection `(⌊ns⌋ + τ[⌊ns⌋]) / n`, with zero-based offsets:
/// subinterval `j` uses `offsets.taus()[j]`.
pub fn kappa_tau(n: usize, s: f64, offsets: &RandomOffsets) -> Result<f64> {
    check_n(n)?;
    if !(0.0..1.0).contains(&s) {
        return Err(Error::Domain(format!("time {s} outside [0, 1)")));
    }
    if offsets.len() < n {
        return Err(Error::Length {
            needed: n,
            available: offsets.len(),
        });
    }
    let j = (libm::floor(n as f64 * s) as usize).min(n - 1);
    Ok((j as f64 + offsets.taus()[j]) / n as f64)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Argument("grid resolution must be at least 1".into()))
    } else {
        Ok(())
    }
}
