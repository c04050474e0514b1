use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;

/// Laurent polynomial `sum_{k=-d}^{d} c_k z^k` with real coefficients,
/// stored as `[c_{-d}, ..., c_0, ..., c_d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LaurentPolynomial {
    coeffs: Vec<f64>,
}

impl TryFrom<Vec<f64>> for LaurentPolynomial {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LaurentPolynomial> for Vec<f64> {
    fn from(p: LaurentPolynomial) -> Self {
        p.coeffs
    }
}

impl LaurentPolynomial {
    /// Centered coefficients; the length must be odd.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::InvalidInput(format!(
                "Laurent coefficients c_-d..c_d need odd length, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite Laurent coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// `q(z^{-1}) q(z)` for `q(z^{-1}) = sum_i q_i z^{-i}`; always symmetric.
    pub fn from_factor(q: &[f64]) -> Self {
        let d = q.len().saturating_sub(1);
        let mut coeffs = vec![0.0; 2 * d + 1];
        for k in 0..=d {
            let s: f64 = (0..q.len() - k).map(|i| q[i] * q[i + k]).sum();
            coeffs[d + k] = s;
            coeffs[d - k] = s;
        }
        if q.is_empty() {
            return Self::zero();
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`.
    pub fn coeff(&self, k: isize) -> f64 {
        let d = self.degree() as isize;
        if k < -d || k > d {
            0.0
        } else {
            self.coeffs[(k + d) as usize]
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1e-300);
        let n = self.coeffs.len();
        (0..n / 2).all(|i| (self.coeffs[i] - self.coeffs[n - 1 - i]).abs() <= tol * scale)
    }

    fn padded(&self, d: usize) -> Vec<f64> {
        let own = self.degree();
        let mut out = vec![0.0; 2 * d + 1];
        out[d - own..d + own + 1].copy_from_slice(&self.coeffs);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.degree().max(other.degree());
        let a = self.padded(d);
        let b = other.padded(d);
        Self {
            coeffs: a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn multiply(&self, other: &Self) -> Self {
        Self {
            coeffs: poly::convolve(&self.coeffs, &other.coeffs),
        }
    }

    pub fn eval_z(&self, z: Complex64) -> Complex64 {
        let d = self.degree() as i32;
        poly::eval(&self.coeffs, z) * z.powi(-d)
    }

    /// Value at `z = e^{j theta}`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let d = self.degree() as isize;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &c) in self.coeffs.iter().enumerate() {
            let k = i as isize - d;
            acc += Complex64::from_polar(c, k as f64 * theta);
        }
        acc
    }

    /// Real value on the unit circle, exact up to rounding for symmetric polynomials.
    pub fn eval_real(&self, theta: f64) -> f64 {
        let d = self.degree() as isize;
        let c0 = self.coeffs[d as usize];
        (1..=d).fold(c0, |acc, k| {
            acc + self.coeff(k) * (k as f64 * theta).cos() + self.coeff(-k) * (k as f64 * theta).cos()
        })
    }

    /// Roots of `z^d p(z)` as an ordinary polynomial.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.coeffs.iter().all(|&c| c == 0.0) {
            return Err(Error::DegeneratePolynomial(
                "Laurent polynomial is identically zero".into(),
            ));
        }
        poly::roots(&self.coeffs)
    }
}
