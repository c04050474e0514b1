//! Dense linear-algebra helpers shared by the rational, norm and metric code.

use nalgebra::{Cholesky, DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub(crate) fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Eigenvalues of a real square matrix.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 20_000 * a.nrows().max(1))
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Finite generalized eigenvalues of the pencil `z E - M`, i.e. the values `z`
/// with `det(M - z E) = 0`.
///
/// The pencil is shifted by a real `s` with `M - s E` invertible; the
/// eigenvalues `mu` of `(M - s E)^{-1} E` map to `z = s + 1/mu`, and the
/// eigenvalues at infinity (singular `E`) land at `mu = 0` and are dropped.
pub fn generalized_eigenvalues(m: &DMatrix<f64>, e: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    const SHIFTS: [f64; 6] = [2.137, -2.411, 0.531, -0.677, 3.913, -5.219];
    let mut best: Option<(f64, f64, DMatrix<f64>)> = None;
    for &s in SHIFTS.iter() {
        let shifted = m - e * s;
        let lu = shifted.clone().lu();
        let u = lu.u();
        let diag: Vec<f64> = (0..n).map(|i| u[(i, i)].abs()).collect();
        let dmax = diag.iter().cloned().fold(0.0, f64::max);
        let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let quality = if dmax > 0.0 { dmin / dmax } else { 0.0 };
        if quality > 1e-3 {
            best = Some((quality, s, shifted));
            break;
        }
        if best.as_ref().map_or(true, |(q, _, _)| quality > *q) {
            best = Some((quality, s, shifted));
        }
    }
    let (quality, s, shifted) = best.expect("at least one shift is tried");
    if quality < 1e-14 {
        return Err(Error::Numerical(
            "pencil is singular for every trial shift".into(),
        ));
    }
    let x = shifted
        .lu()
        .solve(e)
        .ok_or_else(|| Error::Numerical("shifted pencil is singular".into()))?;
    let scale = x.norm().max(1.0);
    Ok(eigenvalues(&x)?
        .into_iter()
        .filter(|mu| mu.norm() > 1e-9 * scale)
        .map(|mu| Complex64::new(s, 0.0) + mu.inv())
        .collect())
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eig(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut idx: Vec<usize> = (0..h.nrows()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    if h.nrows() == 1 {
        return vec![h[(0, 0)].re];
    }
    hermitian_eig(h).0
}

/// Applies a real function to the eigenvalues of a Hermitian matrix.
pub fn hermitian_map(h: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    if h.nrows() == 1 {
        return CMatrix::from_element(1, 1, Complex64::new(f(h[(0, 0)].re), 0.0));
    }
    let (vals, vecs) = hermitian_eig(h);
    let scaled = CMatrix::from_fn(vecs.nrows(), vecs.ncols(), |r, c| vecs[(r, c)] * f(vals[c]));
    &scaled * vecs.adjoint()
}

/// Symmetric PSD square root of a real symmetric matrix.
pub fn sym_sqrt(s: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let n = s.nrows();
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        let v = eig.eigenvectors.column(k);
        out += v * v.transpose() * eig.eigenvalues[k].max(0.0).sqrt();
    }
    out
}

/// Eigenvalues of `Y^{-1/2} X Y^{-1/2}` for Hermitian `X` and Hermitian PD `Y`,
/// ascending. Returns `None` when `Y` is not positive definite.
pub fn generalized_hermitian_eigenvalues(x: &CMatrix, y: &CMatrix) -> Option<Vec<f64>> {
    if x.nrows() == 1 {
        let d = y[(0, 0)].re;
        if d.is_nan() || d <= 0.0 {
            return None;
        }
        return Some(vec![x[(0, 0)].re / d]);
    }
    let y_sym = (y + y.adjoint()) * Complex64::new(0.5, 0.0);
    let chol = Cholesky::new(y_sym)?;
    let l = chol.l();
    let linv_x = l.solve_lower_triangular(x)?;
    let m = l.solve_lower_triangular(&linv_x.adjoint())?;
    Some(hermitian_eigenvalues(&m))
}

/// Largest singular value of a complex matrix.
pub fn sigma_max(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Spectral radius of a real square matrix.
pub fn spectral_radius(a: &DMatrix<f64>) -> Result<f64> {
    Ok(eigenvalues(a)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Solves the Stein equation `P = A P A^T + Q` by Smith doubling.
///
/// Requires `A` to be Schur stable; the caller checks that.
pub fn solve_stein(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut p = q.clone();
    let mut ak = a.clone();
    for _ in 0..80 {
        let inc = &ak * &p * ak.transpose();
        p += &inc;
        if inc.norm() <= 1e-17 * p.norm().max(f64::MIN_POSITIVE) {
            return Ok((&p + p.transpose()) * 0.5);
        }
        ak = &ak * &ak;
        if !ak.iter().all(|x| x.is_finite()) {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: 80,
        residual: (a * &p * a.transpose() + q - &p).norm(),
    })
}

/// 2-norm condition number estimate from singular values.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
