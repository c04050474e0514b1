use num_complex::Complex64;

use super::FrequencyGrid;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// Hermitian PSD matrix values on a uniform frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpectrum {
    grid: FrequencyGrid,
    values: Vec<CMatrix>,
}

impl SampledSpectrum {
    /// Validates shape, Hermitian symmetry and positive semi-definiteness.
    pub fn new(grid: FrequencyGrid, values: Vec<CMatrix>) -> Result<Self> {
        let s = Self::new_hermitian(grid, values)?;
        for (k, v) in s.values.iter().enumerate() {
            let eig = linalg::hermitian_eigenvalues(v);
            let max = eig.iter().cloned().fold(0.0f64, |m, x| m.max(x.abs()));
            if eig[0] < -PSD_TOL * max {
                return Err(Error::NotPositive(format!(
                    "value at theta = {:.6} has eigenvalue {:.3e}",
                    grid.theta(k),
                    eig[0]
                )));
            }
        }
        Ok(s)
    }

    /// Hermitian-valued samples without a sign requirement (tangent vectors).
    pub fn new_hermitian(grid: FrequencyGrid, values: Vec<CMatrix>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "{} samples for a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        let p = values.first().map_or(0, |v| v.nrows());
        if p == 0 {
            return Err(Error::Dimension("empty spectrum values".into()));
        }
        for (k, v) in values.iter().enumerate() {
            if v.nrows() != p || v.ncols() != p {
                return Err(Error::Dimension(format!("sample {k} is not {p}x{p}")));
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidInput(format!("sample {k} is not finite")));
            }
            let scale = v.norm().max(f64::MIN_POSITIVE);
            if (v - v.adjoint()).norm() > HERMITIAN_TOL * scale {
                return Err(Error::InvalidInput(format!(
                    "sample {k} is not Hermitian"
                )));
            }
        }
        let values = values
            .into_iter()
            .map(|v| (&v + v.adjoint()) * Complex64::new(0.5, 0.0))
            .collect();
        Ok(Self { grid, values })
    }

    /// Builds scalar samples from real values.
    pub fn from_scalar(grid: FrequencyGrid, values: &[f64]) -> Result<Self> {
        Self::new(
            grid,
            values
                .iter()
                .map(|&v| CMatrix::from_element(1, 1, Complex64::new(v, 0.0)))
                .collect(),
        )
    }

    pub(crate) fn from_parts_unchecked(grid: FrequencyGrid, values: Vec<CMatrix>) -> Self {
        Self { grid, values }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[CMatrix] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values[0].nrows()
    }

    /// Scalar values (real part of the single entry); `None` unless `dim == 1`.
    pub fn scalar_values(&self) -> Option<Vec<f64>> {
        (self.dim() == 1).then(|| self.values.iter().map(|v| v[(0, 0)].re).collect())
    }

    /// Quadrature of `tr Phi` against `d theta / 2 pi`.
    pub fn trace_integral(&self) -> f64 {
        self.grid.mean(self.values.iter().map(|v| v.trace().re))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .map(|v| v * Complex64::new(k, 0.0))
                .collect(),
        }
    }

    /// Minimum over the grid of the smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        self.values
            .iter()
            .map(|v| linalg::hermitian_eigenvalues(v)[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Requires every value to be positive definite (`lambda_min > rel * lambda_max`).
    pub fn require_definite(&self, rel: f64) -> Result<()> {
        for (k, v) in self.values.iter().enumerate() {
            let eig = linalg::hermitian_eigenvalues(v);
            let max = eig[eig.len() - 1];
            if !(eig[0] > rel * max) || max <= 0.0 {
                return Err(Error::NotPositive(format!(
                    "value at theta = {:.6} is not positive definite (min eigenvalue {:.3e})",
                    self.grid.theta(k),
                    eig[0]
                )));
            }
        }
        Ok(())
    }

    /// Pointwise max relative Frobenius difference.
    pub fn max_relative_error(&self, other: &SampledSpectrum) -> Result<f64> {
        if self.grid != other.grid || self.dim() != other.dim() {
            return Err(Error::Dimension("spectra live on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm() / b.norm().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max))
    }
}
