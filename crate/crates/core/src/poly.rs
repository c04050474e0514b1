//! Real polynomial helpers. Coefficients are stored in ascending powers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

/// Polynomial product.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Horner evaluation at a complex point.
pub fn eval(coeffs: &[f64], x: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

fn eval_with_derivative(coeffs: &[f64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// Balances a companion matrix by diagonal similarity (Parlett-Reinsch).
fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// All complex roots of a real polynomial (ascending coefficients), with
/// multiplicity. Leading zero coefficients are trimmed; trailing zero
/// coefficients contribute roots at the origin.
pub fn roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let top = coeffs
        .iter()
        .rposition(|&c| c != 0.0)
        .ok_or_else(|| Error::DegeneratePolynomial("all coefficients are zero".into()))?;
    let coeffs = &coeffs[..=top];
    let low = coeffs.iter().position(|&c| c != 0.0).unwrap_or(0);
    let mut out = vec![Complex64::new(0.0, 0.0); low];
    let reduced = &coeffs[low..];
    let n = reduced.len() - 1;
    if n == 0 {
        return Ok(out);
    }
    let lead = reduced[n];
    let mut comp = DMatrix::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -reduced[i] / lead;
    }
    balance(&mut comp);
    let mut found = linalg::eigenvalues(&comp)?;
    for r in found.iter_mut() {
        *r = polish(reduced, *r);
    }
    out.extend(found);
    Ok(out)
}

fn polish(coeffs: &[f64], mut x: Complex64) -> Complex64 {
    let mut best = eval(coeffs, x).norm();
    for _ in 0..8 {
        let (p, dp) = eval_with_derivative(coeffs, x);
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let next = x - p / dp;
        let val = eval(coeffs, next).norm();
        if val < best && (next - x).norm() < 1e-3 * (1.0 + x.norm()) {
            best = val;
            x = next;
        } else {
            break;
        }
    }
    x
}

/// Monic polynomial with the given roots; imaginary residue is discarded, so
/// complex roots should come in conjugate pairs.
pub fn from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * r;
        }
        c = next;
    }
    c.into_iter().map(|z| z.re).collect()
}

/// Reverses ascending coefficients of `x^n q(1/x)`.
pub fn reversed(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().rev().copied().collect()
}
