//! Geodesics between spectral densities.
//!
//! [`finsler_geodesic`] is the straight line through the cone
//! `chi(t) = c2(t) Phi2 + c1(t) Phi1`, minimal for the Thompson metric and
//! rational whenever the endpoints are. [`riemannian_geodesic`] is the
//! frequency-wise matrix geometric mean, and [`hilbert_geodesic`] its
//! trace-normalized version on unit-power spectra.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::factorization::{self, FactorOptions, FactoredSpectrum};
use crate::linalg::CMatrix;
use crate::metrics::{self, MetricOptions};
use crate::norms;
use crate::poly;
use crate::rational::{FrequencyGrid, LaurentPolynomial, SampledSpectrum, TransferFunction};
use crate::spectrum::Spectrum;

/// `|beta - alpha| <= DEGENERATE_TOL * beta` selects the `alpha^t Phi1` branch.
pub const DEGENERATE_TOL: f64 = 1e-10;
/// Tolerance on the unit-power precondition of [`hilbert_geodesic`].
pub const NORMALIZATION_TOL: f64 = 1e-8;

/// Endpoints of a Finsler geodesic together with the gains
/// `alpha = 1 / M(Phi1, Phi2)` and `beta = M(Phi2, Phi1)`.
#[derive(Debug, Clone)]
pub struct GeodesicSpec {
    phi1: Spectrum,
    phi2: Spectrum,
    f1: Option<FactoredSpectrum>,
    f2: Option<FactoredSpectrum>,
    alpha: f64,
    beta: f64,
    degenerate: bool,
    grid: FrequencyGrid,
    factor_opts: FactorOptions,
}

impl GeodesicSpec {
    pub fn new(phi1: Spectrum, phi2: Spectrum, opts: &MetricOptions) -> Result<Self> {
        let d = metrics::thompson_distance(&phi1, &phi2, opts)?;
        if d.is_infinite() {
            return Err(Error::InvalidInput(format!(
                "endpoints are at infinite distance: {}",
                d.boundary.unwrap_or_default()
            )));
        }
        let factor = |phi: &Spectrum| {
            if phi.is_rational() {
                factorization::minimum_phase_factor(phi, &opts.factor).ok()
            } else {
                None
            }
        };
        let (f1, f2) = (factor(&phi1), factor(&phi2));
        let alpha = 1.0 / d.m12;
        let beta = d.m21;
        Ok(Self {
            phi1,
            phi2,
            f1,
            f2,
            alpha,
            beta,
            degenerate: (beta - alpha).abs() <= DEGENERATE_TOL * beta,
            grid: opts.grid,
            factor_opts: opts.factor,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn phi1(&self) -> &Spectrum {
        &self.phi1
    }

    pub fn phi2(&self) -> &Spectrum {
        &self.phi2
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    /// `(c1, c2)` with `chi(t) = c2 Phi2 + c1 Phi1`.
    pub fn coefficients(&self, tau: f64) -> (f64, f64) {
        let (a, b) = (self.alpha, self.beta);
        if self.degenerate {
            return (a.powf(tau), 0.0);
        }
        let (at, bt) = (a.powf(tau), b.powf(tau));
        ((b * at - a * bt) / (b - a), (bt - at) / (b - a))
    }

    /// Lower bound `min(alpha^t, beta^t)` on `chi(t)` relative to `Phi1`.
    pub fn positivity_bound(&self, tau: f64) -> f64 {
        self.alpha.powf(tau).min(self.beta.powf(tau))
    }
}

/// A point on a geodesic: a minimum-phase factor when one is available,
/// otherwise grid samples.
#[derive(Debug, Clone)]
pub enum GeodesicPoint {
    Factored(FactoredSpectrum),
    Sampled(SampledSpectrum),
}

impl GeodesicPoint {
    pub fn is_rational(&self) -> bool {
        matches!(self, GeodesicPoint::Factored(_))
    }

    pub fn sample(&self, grid: &FrequencyGrid) -> Result<SampledSpectrum> {
        match self {
            GeodesicPoint::Factored(f) => f.sample(grid),
            GeodesicPoint::Sampled(s) => Spectrum::Sampled(s.clone()).sample(grid),
        }
    }

    pub fn to_spectrum(&self) -> Spectrum {
        match self {
            GeodesicPoint::Factored(f) => f.to_spectrum(),
            GeodesicPoint::Sampled(s) => Spectrum::Sampled(s.clone()),
        }
    }
}

/// `chi(t) = c2(t) Phi2 + c1(t) Phi1` for any real `t`.
///
/// Scalar rational endpoints give a root-flipped rational factor for every
/// `t`. Matrix factors give a rational factor for `t` in `[0, 1]`, obtained by
/// factoring `[sqrt(c2) W2, sqrt(c1) W1]`; elsewhere, and for sampled
/// endpoints, the result is sampled on the grid held by `spec`.
pub fn finsler_geodesic(spec: &GeodesicSpec, tau: f64) -> Result<GeodesicPoint> {
    if !tau.is_finite() {
        return Err(Error::InvalidInput(format!("tau = {tau}")));
    }
    let (c1, c2) = spec.coefficients(tau);
    if let (Some(f1), Some(f2)) = (&spec.f1, &spec.f2) {
        if spec.degenerate || c2 == 0.0 {
            return Ok(GeodesicPoint::Factored(f1.scaled(c1)));
        }
        if c1 == 0.0 {
            return Ok(GeodesicPoint::Factored(f2.scaled(c2)));
        }
        if let (Some(t1), Some(t2)) = (f1.scalar(), f2.scalar()) {
            return scalar_combination(t1, t2, c1, c2, &spec.factor_opts).map(GeodesicPoint::Factored);
        }
        if c1 > 0.0 && c2 > 0.0 {
            let stacked = f2.factor().scale(c2.sqrt()).hstack(&f1.factor().scale(c1.sqrt()))?;
            return factorization::minimum_phase_factor_matrix(&stacked, &spec.factor_opts)
                .map(GeodesicPoint::Factored);
        }
    }
    let s1 = spec.phi1.sample(&spec.grid)?;
    let s2 = spec.phi2.sample(&spec.grid)?;
    let vals: Vec<CMatrix> = s1
        .values()
        .iter()
        .zip(s2.values())
        .map(|(x, y)| y * Complex64::new(c2, 0.0) + x * Complex64::new(c1, 0.0))
        .collect();
    SampledSpectrum::new(spec.grid, vals).map(GeodesicPoint::Sampled)
}

/// Factor of `c2 |b2/a2|^2 + c1 |b1/a1|^2` over the common denominator `a1 a2`.
fn scalar_combination(
    t1: &TransferFunction,
    t2: &TransferFunction,
    c1: f64,
    c2: f64,
    opts: &FactorOptions,
) -> Result<FactoredSpectrum> {
    let lp = LaurentPolynomial::from_factor;
    let num = lp(&t2.num)
        .multiply(&lp(&t1.den))
        .scale(c2)
        .add(&lp(&t1.num).multiply(&lp(&t2.den)).scale(c1));
    let q = factorization::factor_laurent(&num, opts.boundary_tol)?;
    let den = poly::convolve(&t1.den, &t2.den);
    let d0 = den[0];
    let mut tf = TransferFunction::new(
        q.iter().map(|x| x / d0).collect(),
        den.iter().map(|x| x / d0).collect(),
    )?;
    if tf.eval(Complex64::new(1.0, 0.0)).re < 0.0 {
        tf.num.iter_mut().for_each(|x| *x = -*x);
    }
    FactoredSpectrum::from_scalar(tf)
}

/// `Phi1^{1/2} (Phi1^{-1/2} Phi2 Phi1^{-1/2})^t Phi1^{1/2}` at each grid
/// frequency, for any real `t`.
pub fn riemannian_geodesic(
    phi1: &Spectrum,
    phi2: &Spectrum,
    tau: f64,
    grid: &FrequencyGrid,
) -> Result<SampledSpectrum> {
    if phi1.dim() != phi2.dim() {
        return Err(Error::Dimension("endpoints differ in size".into()));
    }
    let s1 = phi1.sample(grid)?;
    let s2 = phi2.sample(grid)?;
    let vals = s1
        .values()
        .par_iter()
        .zip(s2.values())
        .map(|(x, y)| geometric_interpolant(x, y, tau))
        .collect::<Result<Vec<_>>>()?;
    SampledSpectrum::new(*grid, vals)
}

fn geometric_interpolant(x: &CMatrix, y: &CMatrix, tau: f64) -> Result<CMatrix> {
    if x.nrows() == 1 {
        let (a, b) = (x[(0, 0)].re, y[(0, 0)].re);
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::NotPositive("spectrum is not positive at a grid frequency".into()));
        }
        return Ok(CMatrix::from_element(1, 1, Complex64::new(a.powf(1.0 - tau) * b.powf(tau), 0.0)));
    }
    let herm = |m: &CMatrix| (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let not_pd = || Error::NotPositive("spectrum is not positive definite at a grid frequency".into());
    let l = nalgebra::Cholesky::new(herm(x)).ok_or_else(not_pd)?.l();
    let w = l.solve_lower_triangular(y).ok_or_else(not_pd)?;
    let m = herm(&l.solve_lower_triangular(&w.adjoint()).ok_or_else(not_pd)?);
    if crate::linalg::hermitian_eigenvalues(&m)[0] <= 0.0 {
        return Err(not_pd());
    }
    let p = crate::linalg::hermitian_map(&m, |v| v.powf(tau));
    Ok(herm(&(&l * p * l.adjoint())))
}

/// [`riemannian_geodesic`] divided by its power `int tr(.) dtheta / 2 pi`.
/// Both endpoints must already have unit power.
pub fn hilbert_geodesic(
    phi1: &Spectrum,
    phi2: &Spectrum,
    tau: f64,
    grid: &FrequencyGrid,
) -> Result<SampledSpectrum> {
    for (name, phi) in [("first", phi1), ("second", phi2)] {
        let power = phi.sample(grid)?.trace_integral();
        if (power - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidInput(format!(
                "{name} endpoint has power {power}, expected 1"
            )));
        }
    }
    let g = riemannian_geodesic(phi1, phi2, tau, grid)?;
    let c = g.trace_integral();
    Ok(g.scale(1.0 / c))
}

/// `Phi / c` with `c = int tr(Phi) dtheta / 2 pi`, computed as the squared H2
/// norm of the factor for rational spectra and by quadrature on samples.
pub fn normalize_spectrum(phi: &Spectrum) -> Result<Spectrum> {
    let c = match phi {
        Spectrum::Factor(w) => norms::h2_norm_sq(w)?,
        Spectrum::Scalar(_) => {
            let f = factorization::minimum_phase_factor(phi, &FactorOptions::default())?;
            norms::h2_norm_sq(f.factor())?
        }
        Spectrum::Sampled(s) => s.trace_integral(),
    };
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::NotPositive(format!("spectrum has power {c}")));
    }
    Ok(phi.scale(1.0 / c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ScalarRationalSpectrum, StateSpace};
    use nalgebra::DMatrix;

    fn scalar(num: &[f64], den: &[f64]) -> Spectrum {
        Spectrum::Scalar(
            ScalarRationalSpectrum::new(
                LaurentPolynomial::new(num.to_vec()).unwrap(),
                LaurentPolynomial::new(den.to_vec()).unwrap(),
            )
            .unwrap(),
        )
    }

    fn example_spec() -> GeodesicSpec {
        GeodesicSpec::new(
            scalar(&[4.0], &[-2.0, 5.0, -2.0]),
            scalar(&[9.0], &[3.0, 10.0, 3.0]),
            &MetricOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn example_pair_gains() {
        let s = example_spec();
        assert!((s.alpha() - 9.0 / 64.0).abs() < 1e-9);
        assert!((s.beta() - 81.0 / 16.0).abs() < 1e-8);
        assert!(!s.is_degenerate());
    }

    #[test]
    fn endpoints_and_rationality() {
        let s = example_spec();
        let g = FrequencyGrid::new(512).unwrap();
        for (tau, end) in [(0.0, s.phi1()), (1.0, s.phi2())] {
            let p = finsler_geodesic(&s, tau).unwrap();
            assert!(p.is_rational());
            let err = p.sample(&g).unwrap().max_relative_error(&end.sample(&g).unwrap()).unwrap();
            assert!(err < 1e-8, "{err}");
        }
        for tau in [-2.0, 0.3, 0.5, 2.5] {
            let p = finsler_geodesic(&s, tau).unwrap();
            assert!(p.is_rational());
            let (c1, c2) = s.coefficients(tau);
            let direct: Vec<f64> = g
                .thetas()
                .iter()
                .map(|&t| {
                    c2 * 9.0 / (10.0 + 6.0 * t.cos()) + c1 * 4.0 / (5.0 - 4.0 * t.cos())
                })
                .collect();
            let got = p.sample(&g).unwrap().scalar_values().unwrap();
            for (a, b) in got.iter().zip(&direct) {
                assert!((a - b).abs() <= 1e-8 * b.abs(), "tau {tau}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn midpoint_metric_speed() {
        let s = example_spec();
        let mid = finsler_geodesic(&s, 0.5).unwrap().to_spectrum();
        let opts = MetricOptions::grid(8192).unwrap();
        let d = metrics::thompson_distance(s.phi1(), &mid, &opts).unwrap();
        assert!((d.value - 0.5 * (64.0f64 / 9.0).ln()).abs() < 1e-6, "{}", d.value);
    }

    #[test]
    fn degenerate_constants() {
        let s = GeodesicSpec::new(scalar(&[1.0], &[1.0]), scalar(&[4.0], &[1.0]), &MetricOptions::default())
            .unwrap();
        assert!(s.is_degenerate());
        let g = FrequencyGrid::new(16).unwrap();
        for tau in [-1.0, 0.5, 2.0] {
            let v = finsler_geodesic(&s, tau).unwrap().sample(&g).unwrap().scalar_values().unwrap();
            assert!(v.iter().all(|x| (x - 4f64.powf(tau)).abs() < 1e-12));
        }
    }

    #[test]
    fn matrix_interior_is_rational_and_exterior_sampled() {
        let w1 = StateSpace::new(
            DMatrix::from_row_slice(1, 1, &[0.5]),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            DMatrix::from_row_slice(2, 1, &[1.0, 0.3]),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let w2 = StateSpace::new(
            DMatrix::from_row_slice(1, 1, &[-0.4]),
            DMatrix::from_row_slice(1, 2, &[0.0, 1.0]),
            DMatrix::from_row_slice(2, 1, &[0.2, 1.0]),
            DMatrix::identity(2, 2) * 2.0,
        )
        .unwrap();
        let opts = MetricOptions {
            grid: FrequencyGrid::new(256).unwrap(),
            ..MetricOptions::default()
        };
        let s = GeodesicSpec::new(Spectrum::Factor(w1), Spectrum::Factor(w2), &opts).unwrap();
        let g = *s.grid();
        let s1 = s.phi1().sample(&g).unwrap();
        let s2 = s.phi2().sample(&g).unwrap();
        for tau in [0.25, 0.5, 1.7, -0.5] {
            let p = finsler_geodesic(&s, tau).unwrap();
            assert_eq!(p.is_rational(), (0.0..=1.0).contains(&tau));
            let (c1, c2) = s.coefficients(tau);
            let direct: Vec<CMatrix> = s1
                .values()
                .iter()
                .zip(s2.values())
                .map(|(x, y)| y * Complex64::new(c2, 0.0) + x * Complex64::new(c1, 0.0))
                .collect();
            let direct = SampledSpectrum::new(g, direct).unwrap();
            assert!(p.sample(&g).unwrap().max_relative_error(&direct).unwrap() < 1e-8);
        }
    }

    #[test]
    fn riemannian_examples() {
        let g = FrequencyGrid::new(128).unwrap();
        let one = scalar(&[1.0], &[1.0]);
        let four = scalar(&[4.0], &[1.0]);
        let mid = riemannian_geodesic(&one, &four, 0.5, &g).unwrap().scalar_values().unwrap();
        assert!(mid.iter().all(|v| (v - 2.0).abs() < 1e-14));
        let p1 = scalar(&[4.0], &[-2.0, 5.0, -2.0]);
        let p2 = scalar(&[9.0], &[3.0, 10.0, 3.0]);
        let v1 = p1.sample(&g).unwrap().scalar_values().unwrap();
        let v2 = p2.sample(&g).unwrap().scalar_values().unwrap();
        for tau in [-1.0, 0.0, 0.3, 1.0, 2.0] {
            let v = riemannian_geodesic(&p1, &p2, tau, &g).unwrap().scalar_values().unwrap();
            for k in 0..g.len() {
                let want = v1[k].powf(1.0 - tau) * v2[k].powf(tau);
                assert!((v[k] - want).abs() <= 1e-10 * want);
            }
        }
    }

    #[test]
    fn riemannian_matrix_reversal() {
        let g = FrequencyGrid::new(64).unwrap();
        let w1 = StateSpace::new(
            DMatrix::from_row_slice(1, 1, &[0.6]),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.5]),
            DMatrix::from_row_slice(2, 1, &[0.4, -0.2]),
            DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.0, 1.0]),
        )
        .unwrap();
        let w2 = StateSpace::constant(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.3, 1.0]));
        let (a, b) = (Spectrum::Factor(w1), Spectrum::Factor(w2));
        let x = riemannian_geodesic(&a, &b, 0.3, &g).unwrap();
        let y = riemannian_geodesic(&b, &a, 0.7, &g).unwrap();
        assert!(x.max_relative_error(&y).unwrap() < 1e-10);
        let e = riemannian_geodesic(&a, &b, 1.0, &g).unwrap();
        assert!(e.max_relative_error(&b.sample(&g).unwrap()).unwrap() < 1e-10);
    }

    #[test]
    fn hilbert_requires_normalized_inputs() {
        let g = FrequencyGrid::new(256).unwrap();
        let p1 = normalize_spectrum(&scalar(&[4.0], &[-2.0, 5.0, -2.0])).unwrap();
        let p2 = normalize_spectrum(&scalar(&[9.0], &[3.0, 10.0, 3.0])).unwrap();
        for tau in [0.25, 0.5, 0.75] {
            let h = hilbert_geodesic(&p1, &p2, tau, &g).unwrap();
            assert!((h.trace_integral() - 1.0).abs() < 1e-10);
        }
        let end = hilbert_geodesic(&p1, &p2, 1.0, &g).unwrap();
        assert!(end.max_relative_error(&p2.sample(&g).unwrap()).unwrap() < 1e-8);
        assert!(hilbert_geodesic(&p1, &p2.scale(2.0), 0.5, &g).is_err());
    }

    #[test]
    fn normalize_examples() {
        let id = Spectrum::Factor(StateSpace::identity(2));
        let n = normalize_spectrum(&id).unwrap();
        let g = FrequencyGrid::new(8).unwrap();
        let v = n.sample(&g).unwrap();
        assert!((v.values()[3][(0, 0)].re - 0.5).abs() < 1e-15);
        // 1/(z - 1/2): power 4/3
        let w = Spectrum::Factor(StateSpace::from_transfer_function(&[0.0, 1.0], &[1.0, -0.5]).unwrap());
        let n = normalize_spectrum(&w).unwrap();
        let ratio = n.sample(&g).unwrap().values()[2][(0, 0)].re / w.sample(&g).unwrap().values()[2][(0, 0)].re;
        assert!((ratio - 0.75).abs() < 1e-12);
        let again = normalize_spectrum(&n).unwrap();
        assert!(again.sample(&g).unwrap().max_relative_error(&n.sample(&g).unwrap()).unwrap() < 1e-12);
    }
}
