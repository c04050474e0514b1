use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const DEFAULT_GRID_SIZE: usize = 4096;

/// Uniform grid `theta_k = -pi + 2 pi k / N`, `k = 0..N`, covering `[-pi, pi)`.
///
/// Sups over the grid are lower bounds of the circle sup and uniform means
/// are trapezoid quadratures of `d theta / 2 pi`; both carry an `O(1/N)` (or
/// better, for smooth periodic integrands) discretisation bias.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyGrid {
    n: usize,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self { n: DEFAULT_GRID_SIZE }
    }
}

impl FrequencyGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("grid size must be positive".into()));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn theta(&self, k: usize) -> f64 {
        -PI + 2.0 * PI * k as f64 / self.n as f64
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.theta(k)).collect()
    }

    /// Uniform-weight quadrature of `f` against `d theta / 2 pi`.
    pub fn mean(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        values.into_iter().sum::<f64>() / self.n as f64
    }
}
