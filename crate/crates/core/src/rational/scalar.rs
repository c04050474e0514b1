use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FrequencyGrid, LaurentPolynomial, SampledSpectrum, StateSpace};
use crate::error::{Error, Result};
use crate::poly;

/// Scalar spectrum `num(z) / den(z)` with symmetric Laurent numerator and
/// denominator, positive on the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarRationalSpectrum {
    pub num: LaurentPolynomial,
    pub den: LaurentPolynomial,
}

impl ScalarRationalSpectrum {
    pub fn new(num: LaurentPolynomial, den: LaurentPolynomial) -> Result<Self> {
        for (name, p) in [("numerator", &num), ("denominator", &den)] {
            if !p.is_symmetric(1e-12) {
                return Err(Error::InvalidInput(format!("{name} is not symmetric")));
            }
            if p.coeffs().iter().all(|&c| c == 0.0) {
                return Err(Error::DegeneratePolynomial(format!("{name} is zero")));
            }
        }
        Ok(Self { num, den })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            num: LaurentPolynomial::constant(c),
            den: LaurentPolynomial::constant(1.0),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.num.eval_real(theta) / self.den.eval_real(theta)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    /// Checks that numerator and denominator exceed `min` at every grid point.
    pub fn check_positive(&self, grid: &FrequencyGrid, min: f64) -> Result<()> {
        for theta in grid.thetas() {
            let n = self.num.eval_real(theta);
            let d = self.den.eval_real(theta);
            if !(n > min && d > min) {
                return Err(Error::NotPositive(format!(
                    "num = {n:.3e}, den = {d:.3e} at theta = {theta:.6}"
                )));
            }
        }
        Ok(())
    }

    pub fn sample(&self, grid: &FrequencyGrid) -> Result<SampledSpectrum> {
        let vals: Vec<f64> = grid.thetas().iter().map(|&t| self.eval(t)).collect();
        SampledSpectrum::from_scalar(*grid, &vals)
    }
}

/// SISO transfer function `num(z^{-1}) / den(z^{-1})`, ascending powers of
/// `z^{-1}`, with `den[0] != 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferFunction {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl TransferFunction {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        if num.is_empty() || den.is_empty() || den[0] == 0.0 {
            return Err(Error::InvalidInput(
                "transfer function needs a nonempty numerator and den[0] != 0".into(),
            ));
        }
        Ok(Self { num, den })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let w = z.inv();
        poly::eval(&self.num, w) / poly::eval(&self.den, w)
    }

    pub fn eval_theta(&self, theta: f64) -> Complex64 {
        self.eval(Complex64::from_polar(1.0, theta))
    }

    /// `|w(e^{j theta})|^2`
    pub fn power(&self, theta: f64) -> f64 {
        self.eval_theta(theta).norm_sqr()
    }

    pub fn to_state_space(&self) -> Result<StateSpace> {
        StateSpace::from_transfer_function(&self.num, &self.den)
    }

    /// The spectrum `w w*`.
    pub fn spectrum(&self) -> ScalarRationalSpectrum {
        ScalarRationalSpectrum {
            num: LaurentPolynomial::from_factor(&self.num),
            den: LaurentPolynomial::from_factor(&self.den),
        }
    }

    /// Poles in the z-plane (roots of `z^n den(z^{-1})`).
    pub fn poles(&self) -> Result<Vec<Complex64>> {
        poly::roots(&poly::reversed(&self.den))
    }

    /// Finite zeros in the z-plane.
    pub fn zeros(&self) -> Result<Vec<Complex64>> {
        poly::roots(&poly::reversed(&self.num))
    }

    /// `self / other`.
    pub fn ratio(&self, other: &TransferFunction) -> Result<TransferFunction> {
        TransferFunction::new(
            poly::convolve(&self.num, &other.den),
            poly::convolve(&self.den, &other.num),
        )
    }

    pub fn multiply(&self, other: &TransferFunction) -> TransferFunction {
        TransferFunction {
            num: poly::convolve(&self.num, &other.num),
            den: poly::convolve(&self.den, &other.den),
        }
    }
}
