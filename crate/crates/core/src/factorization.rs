//! Minimum-phase spectral factorization.
//!
//! Matrix spectra `Phi = W0 W0*` are refactored through the innovations
//! (Kalman predictor) Riccati recursion; scalar spectra given as Laurent
//! ratios are factored by flipping the polynomial roots into the closed unit
//! disk.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::poly;
use crate::rational::{
    FrequencyGrid, LaurentPolynomial, SampledSpectrum, ScalarRationalSpectrum, StateSpace,
    TransferFunction,
};
use crate::spectrum::Spectrum;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// `||r| - 1|` below which a root counts as lying on the unit circle.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Relative eigenvalue floor of the innovation covariance.
const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorOptions {
    /// Riccati stopping rule `||P_{k+1} - P_k||_F <= tol (1 + ||P_k||_F)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Unit-circle tolerance for scalar root flipping.
    pub boundary_tol: f64,
}

impl Default for FactorOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            boundary_tol: BOUNDARY_TOL,
        }
    }
}

/// A square, biproper, minimum-phase factor `W` with `Phi = W W*`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredSpectrum {
    factor: StateSpace,
    scalar: Option<TransferFunction>,
    rank: usize,
}

impl FactoredSpectrum {
    pub fn factor(&self) -> &StateSpace {
        &self.factor
    }

    /// The scalar factor `b(z^{-1}) / a(z^{-1})`, when the spectrum is scalar
    /// and was factored by root flipping.
    pub fn scalar(&self) -> Option<&TransferFunction> {
        self.scalar.as_ref()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.factor.outputs()
    }

    pub fn to_spectrum(&self) -> Spectrum {
        match &self.scalar {
            Some(tf) => Spectrum::Scalar(tf.spectrum()),
            None => Spectrum::Factor(self.factor.clone()),
        }
    }

    pub fn sample(&self, grid: &FrequencyGrid) -> Result<SampledSpectrum> {
        Spectrum::Factor(self.factor.clone()).sample(grid)
    }

    /// `W^{-1}`; minimum-phase factors are biproper, so this always exists.
    pub fn inverse(&self) -> Result<StateSpace> {
        self.factor.inverse()
    }

    /// Factor of `c Phi` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        let k = c.sqrt();
        Self {
            factor: self.factor.scale(k),
            scalar: self.scalar.as_ref().map(|tf| TransferFunction {
                num: tf.num.iter().map(|x| x * k).collect(),
                den: tf.den.clone(),
            }),
            rank: self.rank,
        }
    }

    pub(crate) fn from_scalar(tf: TransferFunction) -> Result<Self> {
        Ok(Self {
            factor: tf.to_state_space()?,
            scalar: Some(tf),
            rank: 1,
        })
    }
}

/// Convergence record of the Riccati recursion.
#[derive(Debug, Clone, Default)]
pub struct RiccatiTrace {
    pub iterations: usize,
    /// `||P_{k+1} - P_k||_F` per step.
    pub increments: Vec<f64>,
    /// Smallest eigenvalue of each iterate.
    pub min_eigenvalues: Vec<f64>,
}

/// Factors `Phi = W0 W0*` for a stable `p x m` realization `W0` (`m >= p`).
///
/// Runs `P <- A P A' + B B' - S L^{-1} S'` with `S = A P C' + B D'`,
/// `L = C P C' + D D'`, started from the state covariance, and returns
/// `(A, K L^{1/2}, C, L^{1/2})` with `K = S L^{-1}` and the symmetric square root.
pub fn minimum_phase_factor_matrix(w0: &StateSpace, opts: &FactorOptions) -> Result<FactoredSpectrum> {
    riccati_factor(w0, opts, false).map(|(f, _)| f)
}

/// [`minimum_phase_factor_matrix`] plus the iterate history.
pub fn minimum_phase_factor_matrix_traced(
    w0: &StateSpace,
    opts: &FactorOptions,
) -> Result<(FactoredSpectrum, RiccatiTrace)> {
    riccati_factor(w0, opts, true)
}

fn check_rank(lambda: &DMatrix<f64>) -> Result<()> {
    let eig = nalgebra::SymmetricEigen::new(lambda.clone()).eigenvalues;
    let max = eig.iter().cloned().fold(0.0, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min <= RANK_TOL * max {
        return Err(Error::UnsupportedRank(format!(
            "innovation covariance has eigenvalues in [{min:.3e}, {max:.3e}]"
        )));
    }
    Ok(())
}

fn riccati_factor(
    w0: &StateSpace,
    opts: &FactorOptions,
    traced: bool,
) -> Result<(FactoredSpectrum, RiccatiTrace)> {
    let p = w0.outputs();
    if w0.inputs() < p {
        return Err(Error::UnsupportedRank(format!(
            "{}x{} factor cannot have full normal rank",
            p,
            w0.inputs()
        )));
    }
    w0.require_stable()?;
    let (a, b, c, d) = (w0.a(), w0.b(), w0.c(), w0.d());
    let mut trace = RiccatiTrace::default();

    if w0.order() == 0 {
        let lambda = d * d.transpose();
        check_rank(&lambda)?;
        let root = linalg::sym_sqrt(&lambda);
        return Ok((
            FactoredSpectrum {
                factor: StateSpace::constant(root),
                scalar: None,
                rank: p,
            },
            trace,
        ));
    }

    let bbt = b * b.transpose();
    let bdt = b * d.transpose();
    let ddt = d * d.transpose();
    let mut pm = linalg::solve_stein(a, &bbt)?;
    let mut converged = false;
    let mut last = f64::INFINITY;
    for it in 0..opts.max_iter {
        let s = a * &pm * c.transpose() + &bdt;
        let lambda = c * &pm * c.transpose() + &ddt;
        let lambda_inv = lambda
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::UnsupportedRank("innovation covariance is singular".into()))?;
        let mut next = a * &pm * a.transpose() + &bbt - &s * lambda_inv * s.transpose();
        next = (&next + next.transpose()) * 0.5;
        let delta = (&next - &pm).norm();
        if traced {
            trace.increments.push(delta);
            trace
                .min_eigenvalues
                .push(nalgebra::SymmetricEigen::new(next.clone()).eigenvalues.min());
        }
        let scale = 1.0 + pm.norm();
        pm = next;
        last = delta;
        trace.iterations = it + 1;
        if !delta.is_finite() {
            break;
        }
        if delta <= opts.tol * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: trace.iterations,
            residual: last,
        });
    }
    let s = a * &pm * c.transpose() + &bdt;
    let lambda = c * &pm * c.transpose() + &ddt;
    let lambda = (&lambda + lambda.transpose()) * 0.5;
    check_rank(&lambda)?;
    let k = &s * lambda.clone().try_inverse().expect("rank checked");
    let root = linalg::sym_sqrt(&lambda);
    let factor = StateSpace::new(a.clone(), &k * &root, c.clone(), root)?;
    Ok((
        FactoredSpectrum {
            factor,
            scalar: None,
            rank: p,
        },
        trace,
    ))
}

/// Strips symmetric zero ends so the leading coefficient is nonzero.
fn compact(p: &LaurentPolynomial) -> Result<Vec<f64>> {
    let c = p.coeffs();
    let first = c
        .iter()
        .position(|&x| x != 0.0)
        .ok_or_else(|| Error::DegeneratePolynomial("polynomial is identically zero".into()))?;
    let last = c.iter().rposition(|&x| x != 0.0).unwrap();
    let d = p.degree();
    let half = (d - first).max(last - d);
    Ok(c[d - half..=d + half].to_vec())
}

/// Minimum-phase `q(z^{-1})` with `p = q q*` for a symmetric Laurent
/// polynomial `p` positive on the circle. Roots within `boundary_tol` of the
/// circle are reported as [`Error::BoundaryRoot`].
pub fn factor_laurent(p: &LaurentPolynomial, boundary_tol: f64) -> Result<Vec<f64>> {
    let coeffs = compact(p)?;
    let d = coeffs.len() / 2;
    let center = coeffs[d];
    if d == 0 {
        if center <= 0.0 {
            return Err(Error::NotPositive(format!("constant {center} is not positive")));
        }
        return Ok(vec![center.sqrt()]);
    }
    let mut roots = poly::roots(&coeffs)?;
    if roots.len() != 2 * d {
        return Err(Error::Numerical(format!(
            "expected {} roots, found {}",
            2 * d,
            roots.len()
        )));
    }
    roots.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
    for r in &roots {
        if (r.norm() - 1.0).abs() <= boundary_tol {
            return Err(Error::BoundaryRoot { root: *r });
        }
    }
    if roots[d - 1].norm() >= 1.0 || roots[d].norm() <= 1.0 {
        // a multiple root on the circle splits by about sqrt(eps)
        let nearest = roots[d - 1..=d]
            .iter()
            .min_by(|x, y| (x.norm() - 1.0).abs().total_cmp(&(y.norm() - 1.0).abs()))
            .copied()
            .unwrap();
        if (nearest.norm() - 1.0).abs() <= 1e-6 {
            return Err(Error::BoundaryRoot { root: nearest });
        }
        return Err(Error::Numerical(
            "roots do not split evenly across the unit circle".into(),
        ));
    }
    let inside = &roots[..d];
    let q = poly::reversed(&poly::from_roots(inside));
    // fit the positive gain on a few circle points
    let probe = FrequencyGrid::new(2 * d + 2)?;
    let (mut num, mut den) = (0.0, 0.0);
    for t in probe.thetas() {
        num += p.eval_real(t);
        den += poly::eval(&q, Complex64::from_polar(1.0, -t)).norm_sqr();
    }
    let g = num / den;
    if !(g > 0.0) {
        return Err(Error::NotPositive("Laurent polynomial is not positive on the circle".into()));
    }
    let sg = g.sqrt();
    Ok(q.iter().map(|x| x * sg).collect())
}

/// Factors a scalar rational spectrum by root flipping. The returned factor
/// has a monic denominator and `w(1) > 0`.
pub fn minimum_phase_factor_scalar(
    phi: &ScalarRationalSpectrum,
    opts: &FactorOptions,
) -> Result<FactoredSpectrum> {
    let probe = FrequencyGrid::default();
    let scale = |p: &LaurentPolynomial| p.coeffs().iter().map(|c| c.abs()).sum::<f64>();
    let (sn, sd) = (scale(&phi.num), scale(&phi.den));
    for t in probe.thetas() {
        let n = phi.num.eval_real(t);
        let d = phi.den.eval_real(t);
        if n < -1e-12 * sn || d < -1e-12 * sd || !n.is_finite() || !d.is_finite() {
            return Err(Error::NotPositive(format!(
                "num = {n:.3e}, den = {d:.3e} at theta = {t:.6}"
            )));
        }
        if n <= 1e-12 * sn || d <= 1e-12 * sd {
            return Err(Error::BoundaryRoot {
                root: Complex64::from_polar(1.0, t),
            });
        }
    }
    let b = factor_laurent(&phi.num, opts.boundary_tol)?;
    let a = factor_laurent(&phi.den, opts.boundary_tol)?;
    let a0 = a[0];
    let mut tf = TransferFunction::new(
        b.iter().map(|x| x / a0).collect(),
        a.iter().map(|x| x / a0).collect(),
    )?;
    if tf.eval(Complex64::new(1.0, 0.0)).re < 0.0 {
        tf.num.iter_mut().for_each(|x| *x = -*x);
    }
    FactoredSpectrum::from_scalar(tf)
}

/// Factors any rational [`Spectrum`]; sampled spectra have no rational factor.
pub fn minimum_phase_factor(phi: &Spectrum, opts: &FactorOptions) -> Result<FactoredSpectrum> {
    match phi {
        Spectrum::Factor(w) => minimum_phase_factor_matrix(w, opts),
        Spectrum::Scalar(s) => minimum_phase_factor_scalar(s, opts),
        Spectrum::Sampled(_) => Err(Error::InvalidInput(
            "sampled spectra have no rational factor".into(),
        )),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimumPhaseReport {
    pub minimum_phase: bool,
    pub poles: Vec<Complex64>,
    /// Finite invariant zeros.
    pub zeros: Vec<Complex64>,
    /// False when `D` is singular, i.e. the system has zeros at infinity.
    pub biproper: bool,
    pub max_pole_modulus: f64,
    /// `+inf` for non-biproper systems.
    pub max_zero_modulus: f64,
}

/// Poles strictly inside `|z| < 1 - 1e-9`, zeros in `|z| <= 1 + 1e-9`.
pub fn is_minimum_phase(w: &StateSpace) -> Result<MinimumPhaseReport> {
    if !w.is_square() {
        return Err(Error::Dimension("minimum phase requires a square system".into()));
    }
    let poles = w.poles()?;
    let biproper = linalg::condition_number(w.d()) < crate::rational::MAX_FEEDTHROUGH_COND;
    let zeros = w.zeros()?;
    let max_pole_modulus = poles.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let finite_max = zeros.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let max_zero_modulus = if biproper { finite_max } else { f64::INFINITY };
    Ok(MinimumPhaseReport {
        minimum_phase: max_pole_modulus < 1.0 - BOUNDARY_TOL && max_zero_modulus <= 1.0 + BOUNDARY_TOL,
        poles,
        zeros,
        biproper,
        max_pole_modulus,
        max_zero_modulus,
    })
}

/// `max_k ||W W* - Phi||_F / ||Phi||_F` over the reference grid.
pub fn verify_factorization(w: &StateSpace, reference: &SampledSpectrum) -> Result<f64> {
    if w.outputs() != reference.dim() {
        return Err(Error::Dimension(format!(
            "factor has {} outputs, reference spectrum is {}x{}",
            w.outputs(),
            reference.dim(),
            reference.dim()
        )));
    }
    let vals = w.sample(reference.grid())?;
    Ok(vals
        .iter()
        .zip(reference.values())
        .map(|(g, phi)| {
            let prod: CMatrix = g * g.adjoint();
            (prod - phi).norm() / phi.norm().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max))
}
