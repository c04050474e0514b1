//! Conal gains and the distances built on them.
//!
//! `M(Phi1, Phi2)` is the smallest `lambda` with `Phi1 <= lambda Phi2` at every
//! frequency. On the rational path it is `||W2^{-1} W1||_{H-inf}^2` for the
//! minimum-phase factors; on the grid path it is the largest generalized
//! eigenvalue of `(Phi1(theta), Phi2(theta))` maximised over the grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorization::{self, FactorOptions, FactoredSpectrum};
use crate::linalg::{self, CMatrix};
use crate::norms::{self, DEFAULT_HINF_TOL};
use crate::rational::{FrequencyGrid, SampledSpectrum, StateSpace};
use crate::spectrum::Spectrum;

/// Spectra count as full rank when `lambda_min > DEFINITE_TOL * lambda_max`.
pub const DEFINITE_TOL: f64 = 1e-12;
/// Ratio poles/zeros within this distance of the circle make a gain infinite.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalPath {
    Rational,
    Grid,
}

impl std::str::FromStr for EvalPath {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(EvalPath::Rational),
            "grid" => Ok(EvalPath::Grid),
            other => Err(Error::InvalidInput(format!("unknown path '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricOptions {
    pub path: EvalPath,
    pub grid: FrequencyGrid,
    pub hinf_tol: f64,
    pub factor: FactorOptions,
}

impl Default for MetricOptions {
    fn default() -> Self {
        Self {
            path: EvalPath::Rational,
            grid: FrequencyGrid::default(),
            hinf_tol: DEFAULT_HINF_TOL,
            factor: FactorOptions::default(),
        }
    }
}

impl MetricOptions {
    pub fn grid(n: usize) -> Result<Self> {
        Ok(Self {
            path: EvalPath::Grid,
            grid: FrequencyGrid::new(n)?,
            ..Self::default()
        })
    }
}

/// One directed gain `M(Phi_a, Phi_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gain {
    /// `+inf` when `Phi_a` is not dominated by a multiple of `Phi_b`.
    pub value: f64,
    pub peak_frequency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceResult {
    /// Nonnegative, possibly `+inf`.
    pub value: f64,
    /// `M(Phi1, Phi2)`
    pub m12: f64,
    /// `M(Phi2, Phi1)`
    pub m21: f64,
    pub peak_12: Option<f64>,
    pub peak_21: Option<f64>,
    pub path: EvalPath,
    /// The rational path was requested but could not be used.
    pub fell_back: bool,
    /// Why the distance is infinite, when it is.
    pub boundary: Option<String>,
}

impl DistanceResult {
    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

struct GainPair {
    g12: Gain,
    g21: Gain,
    path: EvalPath,
    fell_back: bool,
    boundary: Option<String>,
}

fn check_dims(phi1: &Spectrum, phi2: &Spectrum) -> Result<()> {
    if phi1.dim() != phi2.dim() {
        return Err(Error::Dimension(format!(
            "spectra are {0}x{0} and {1}x{1}",
            phi1.dim(),
            phi2.dim()
        )));
    }
    Ok(())
}

/// Samples a spectrum and requires it to be positive definite on the grid.
pub fn sample_definite(phi: &Spectrum, grid: &FrequencyGrid) -> Result<SampledSpectrum> {
    let s = phi.sample(grid)?;
    s.require_definite(DEFINITE_TOL).map_err(|e| match e {
        Error::NotPositive(msg) => Error::UnsupportedRank(msg),
        other => other,
    })?;
    Ok(s)
}

/// `max_theta lambda_max(Phi_b^{-1/2} Phi_a Phi_b^{-1/2})` on sampled values.
pub fn gain_on_samples(a: &SampledSpectrum, b: &SampledSpectrum) -> Result<Gain> {
    if a.grid() != b.grid() || a.dim() != b.dim() {
        return Err(Error::Dimension("spectra live on different grids".into()));
    }
    let mut best = f64::NEG_INFINITY;
    let mut at = 0;
    for (k, (x, y)) in a.values().iter().zip(b.values()).enumerate() {
        let eig = linalg::generalized_hermitian_eigenvalues(x, y)
            .ok_or_else(|| Error::UnsupportedRank(format!("singular at theta = {}", a.grid().theta(k))))?;
        let top = eig[eig.len() - 1];
        if top > best {
            best = top;
            at = k;
        }
    }
    Ok(Gain {
        value: best,
        peak_frequency: Some(a.grid().theta(at)),
    })
}

fn grid_gains(phi1: &Spectrum, phi2: &Spectrum, grid: &FrequencyGrid) -> Result<(Gain, Gain)> {
    let s1 = sample_definite(phi1, grid)?;
    let s2 = sample_definite(phi2, grid)?;
    Ok((gain_on_samples(&s1, &s2)?, gain_on_samples(&s2, &s1)?))
}

/// `W_b^{-1} W_a` for two minimum-phase factors.
pub fn factor_ratio(a: &FactoredSpectrum, b: &FactoredSpectrum) -> Result<StateSpace> {
    match (a.scalar(), b.scalar()) {
        (Some(ta), Some(tb)) => ta.ratio(tb)?.to_state_space(),
        _ => b.inverse()?.series(a.factor()),
    }
}

fn boundary_pole(r: &StateSpace) -> Result<Option<num_complex::Complex64>> {
    Ok(r
        .poles()?
        .into_iter()
        .find(|p| (p.norm() - 1.0).abs() <= BOUNDARY_TOL || p.norm() > 1.0))
}

/// `M(Phi_a, Phi_b) = ||W_b^{-1} W_a||_{H-inf}^2`, or `+inf` when the ratio
/// has a pole on (or outside) the circle.
fn rational_gain(a: &FactoredSpectrum, b: &FactoredSpectrum, tol: f64) -> Result<(Gain, Option<String>)> {
    let r = factor_ratio(a, b)?;
    if let Some(p) = boundary_pole(&r)? {
        return Ok((
            Gain {
                value: f64::INFINITY,
                peak_frequency: Some(p.arg()),
            },
            Some(format!("factor ratio has a pole at {p} on the unit circle")),
        ));
    }
    let n = norms::hinf_norm(&r, tol)?;
    Ok((
        Gain {
            value: n.value * n.value,
            peak_frequency: Some(n.peak_frequency),
        },
        None,
    ))
}

enum Factored {
    Both(FactoredSpectrum, FactoredSpectrum),
    Boundary(String),
    Unavailable,
}

fn factor_both(phi1: &Spectrum, phi2: &Spectrum, opts: &FactorOptions) -> Result<Factored> {
    if !phi1.is_rational() || !phi2.is_rational() {
        return Ok(Factored::Unavailable);
    }
    let mut out = Vec::with_capacity(2);
    for phi in [phi1, phi2] {
        match factorization::minimum_phase_factor(phi, opts) {
            Ok(f) => out.push(f),
            Err(Error::BoundaryRoot { root }) => {
                return Ok(Factored::Boundary(format!(
                    "spectral factor has a zero or pole at {root} on the unit circle"
                )))
            }
            Err(e @ (Error::NotPositive(_) | Error::UnsupportedRank(_) | Error::Dimension(_))) => {
                return Err(e)
            }
            Err(Error::Unstable { radius }) => return Err(Error::Unstable { radius }),
            Err(_) => return Ok(Factored::Unavailable),
        }
    }
    let f2 = out.pop().unwrap();
    let f1 = out.pop().unwrap();
    Ok(Factored::Both(f1, f2))
}

fn gains(phi1: &Spectrum, phi2: &Spectrum, opts: &MetricOptions) -> Result<GainPair> {
    check_dims(phi1, phi2)?;
    if opts.path == EvalPath::Rational {
        match factor_both(phi1, phi2, &opts.factor)? {
            Factored::Both(f1, f2) => {
                let ratios = rational_gain(&f1, &f2, opts.hinf_tol)
                    .and_then(|g12| rational_gain(&f2, &f1, opts.hinf_tol).map(|g21| (g12, g21)));
                match ratios {
                    Ok(((g12, b12), (g21, b21))) => {
                        return Ok(GainPair {
                            g12,
                            g21,
                            path: EvalPath::Rational,
                            fell_back: false,
                            boundary: b12.or(b21),
                        })
                    }
                    Err(e) if e.is_input_error() => return Err(e),
                    Err(_) => {}
                }
            }
            Factored::Boundary(reason) => {
                return Ok(GainPair {
                    g12: Gain {
                        value: f64::INFINITY,
                        peak_frequency: None,
                    },
                    g21: Gain {
                        value: f64::INFINITY,
                        peak_frequency: None,
                    },
                    path: EvalPath::Rational,
                    fell_back: false,
                    boundary: Some(reason),
                })
            }
            Factored::Unavailable => {}
        }
        let (g12, g21) = grid_gains(phi1, phi2, &opts.grid)?;
        return Ok(GainPair {
            g12,
            g21,
            path: EvalPath::Grid,
            fell_back: true,
            boundary: None,
        });
    }
    let (g12, g21) = grid_gains(phi1, phi2, &opts.grid)?;
    Ok(GainPair {
        g12,
        g21,
        path: EvalPath::Grid,
        fell_back: false,
        boundary: None,
    })
}

/// `M(Phi1, Phi2)`.
pub fn gain_m(phi1: &Spectrum, phi2: &Spectrum, opts: &MetricOptions) -> Result<Gain> {
    check_dims(phi1, phi2)?;
    if opts.path == EvalPath::Grid || !phi1.is_rational() || !phi2.is_rational() {
        let s1 = sample_definite(phi1, &opts.grid)?;
        let s2 = sample_definite(phi2, &opts.grid)?;
        return gain_on_samples(&s1, &s2);
    }
    Ok(gains(phi1, phi2, opts)?.g12)
}

/// `m(Phi1, Phi2) = 1 / M(Phi2, Phi1)`.
pub fn gain_m_lower(phi1: &Spectrum, phi2: &Spectrum, opts: &MetricOptions) -> Result<f64> {
    Ok(1.0 / gain_m(phi2, phi1, opts)?.value)
}

fn result(pair: GainPair, value: f64) -> DistanceResult {
    DistanceResult {
        value,
        m12: pair.g12.value,
        m21: pair.g21.value,
        peak_12: pair.g12.peak_frequency,
        peak_21: pair.g21.peak_frequency,
        path: pair.path,
        fell_back: pair.fell_back,
        boundary: pair.boundary,
    }
}

/// `d_T = log max{M12, M21}`.
pub fn thompson_distance(phi1: &Spectrum, phi2: &Spectrum, opts: &MetricOptions) -> Result<DistanceResult> {
    let pair = gains(phi1, phi2, opts)?;
    let v = pair.g12.value.max(pair.g21.value).ln().max(0.0);
    Ok(result(pair, v))
}

/// `d_H = log (M12 M21)`.
pub fn hilbert_distance(phi1: &Spectrum, phi2: &Spectrum, opts: &MetricOptions) -> Result<DistanceResult> {
    let pair = gains(phi1, phi2, opts)?;
    let v = (pair.g12.value * pair.g21.value).ln().max(0.0);
    Ok(result(pair, v))
}

/// Square root of the trapezoid quadrature of
/// `||log(Phi1^{-1/2} Phi2 Phi1^{-1/2})||_F^2 d theta / 2 pi`.
pub fn riemannian_distance(phi1: &Spectrum, phi2: &Spectrum, grid: &FrequencyGrid) -> Result<f64> {
    check_dims(phi1, phi2)?;
    let s1 = sample_definite(phi1, grid).map_err(not_pd)?;
    let s2 = sample_definite(phi2, grid).map_err(not_pd)?;
    let mut acc = Vec::with_capacity(grid.len());
    for (x, y) in s1.values().iter().zip(s2.values()) {
        let eig = linalg::generalized_hermitian_eigenvalues(y, x)
            .ok_or_else(|| Error::NotPositive("singular spectrum value".into()))?;
        acc.push(eig.iter().map(|l| l.ln().powi(2)).sum::<f64>());
    }
    Ok(grid.mean(acc).sqrt())
}

fn not_pd(e: Error) -> Error {
    match e {
        Error::UnsupportedRank(msg) => Error::NotPositive(msg),
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Divergence {
    pub value: f64,
    pub path: EvalPath,
    pub fell_back: bool,
}

/// `||W2^{-1} W1||_{H2}^2 + ||W1^{-1} W2||_{H2}^2 - 2n`, falling back to the
/// grid quadrature of `tr(Phi2^{-1} Phi1) + tr(Phi1^{-1} Phi2) - 2n` when a
/// factor or ratio is unavailable.
pub fn frobenius_divergence(phi1: &Spectrum, phi2: &Spectrum, opts: &MetricOptions) -> Result<Divergence> {
    check_dims(phi1, phi2)?;
    let n = phi1.dim() as f64;
    if opts.path == EvalPath::Rational {
        if let Factored::Both(f1, f2) = factor_both(phi1, phi2, &opts.factor)? {
            let h2 = |a: &FactoredSpectrum, b: &FactoredSpectrum| -> Result<f64> {
                let r = factor_ratio(a, b)?;
                if boundary_pole(&r)?.is_some() {
                    return Err(Error::Unstable { radius: 1.0 });
                }
                norms::h2_norm_sq(&r)
            };
            if let (Ok(a), Ok(b)) = (h2(&f1, &f2), h2(&f2, &f1)) {
                return Ok(Divergence {
                    value: a + b - 2.0 * n,
                    path: EvalPath::Rational,
                    fell_back: false,
                });
            }
        }
    }
    let s1 = sample_definite(phi1, &opts.grid)?;
    let s2 = sample_definite(phi2, &opts.grid)?;
    let mut terms = Vec::with_capacity(opts.grid.len());
    for (x, y) in s1.values().iter().zip(s2.values()) {
        let e12 = linalg::generalized_hermitian_eigenvalues(x, y)
            .ok_or_else(|| Error::UnsupportedRank("singular spectrum value".into()))?;
        terms.push(e12.iter().map(|l| l + 1.0 / l).sum::<f64>());
    }
    Ok(Divergence {
        value: opts.grid.mean(terms) - 2.0 * n,
        path: EvalPath::Grid,
        fell_back: opts.path == EvalPath::Rational,
    })
}

fn tangent_eigenvalues(v: &SampledSpectrum, x: &SampledSpectrum) -> Result<Vec<(f64, f64)>> {
    if v.grid() != x.grid() || v.dim() != x.dim() {
        return Err(Error::Dimension("tangent and base point differ in grid or size".into()));
    }
    x.require_definite(DEFINITE_TOL)?;
    v.values()
        .iter()
        .zip(x.values())
        .map(|(vv, xx): (&CMatrix, &CMatrix)| {
            let e = linalg::generalized_hermitian_eigenvalues(vv, xx)
                .ok_or_else(|| Error::NotPositive("base point is not positive definite".into()))?;
            Ok((e[0], e[e.len() - 1]))
        })
        .collect()
}

/// Thompson Finsler norm `inf{a > 0 : -a x <= v <= a x}`: the grid max of the
/// spectral radius of `x^{-1/2} v x^{-1/2}`.
pub fn finsler_norm_thompson(v: &SampledSpectrum, x: &SampledSpectrum) -> Result<f64> {
    Ok(tangent_eigenvalues(v, x)?
        .into_iter()
        .map(|(lo, hi)| lo.abs().max(hi.abs()))
        .fold(0.0, f64::max))
}

/// Hilbert seminorm `M(v, x) - m(v, x)`.
pub fn hilbert_seminorm(v: &SampledSpectrum, x: &SampledSpectrum) -> Result<f64> {
    let eig = tangent_eigenvalues(v, x)?;
    let hi = eig.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let lo = eig.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
    Ok((hi - lo).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TangentNorm {
    Thompson,
    Hilbert,
}

/// Forward-difference length `sum_i ||(g_{i+1} - g_i)/dt||_{g_i} dt` of a
/// sampled path given as `(t_i, gamma(t_i))` with increasing `t_i`.
pub fn curve_length(path: &[(f64, SampledSpectrum)], norm: TangentNorm) -> Result<f64> {
    if path.len() < 3 {
        return Err(Error::InvalidInput("a path needs at least three points".into()));
    }
    let mut total = 0.0;
    for w in path.windows(2) {
        let (t0, g0) = (&w[0].0, &w[0].1);
        let (t1, g1) = (&w[1].0, &w[1].1);
        let dt = t1 - t0;
        if !(dt > 0.0) {
            return Err(Error::InvalidInput("path parameters must increase".into()));
        }
        if g0.grid() != g1.grid() {
            return Err(Error::Dimension("path points live on different grids".into()));
        }
        let vals: Vec<CMatrix> = g1
            .values()
            .iter()
            .zip(g0.values())
            .map(|(a, b)| (a - b) / num_complex::Complex64::new(dt, 0.0))
            .collect();
        let v = SampledSpectrum::new_hermitian(*g0.grid(), vals)?;
        let speed = match norm {
            TangentNorm::Thompson => finsler_norm_thompson(&v, g0)?,
            TangentNorm::Hilbert => hilbert_seminorm(&v, g0)?,
        };
        total += speed * dt;
    }
    Ok(total)
}
