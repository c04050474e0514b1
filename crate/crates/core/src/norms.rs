//! H-infinity, L-infinity and H2 norms of discrete-time rational matrix functions.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::rational::{FrequencyGrid, StateSpace};

pub const DEFAULT_HINF_TOL: f64 = 1e-8;
/// Eigenvalues of the symplectic pencil with `||z| - 1| <= UNIT_TOL` are crossings.
const UNIT_TOL: f64 = 1e-8;
/// Looser band whose angles are still probed.
const PROBE_TOL: f64 = 1e-6;
const MAX_PENCIL_COND: f64 = 1e12;
const MAX_BISECTIONS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMethod {
    Bisection,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormResult {
    pub value: f64,
    /// Frequency in `[-pi, pi)` where `value` is attained.
    pub peak_frequency: f64,
    pub method: NormMethod,
    /// `[lo, hi]` bracketing the true norm; `hi = inf` for grid estimates.
    pub interval: (f64, f64),
}

fn wrap(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t >= PI {
        -PI
    } else {
        t
    }
}

fn sigma_at(g: &StateSpace, theta: f64) -> Result<f64> {
    Ok(linalg::sigma_max(&g.evaluate_unchecked(Complex64::from_polar(1.0, theta))?))
}

/// `max_k sigma_max(values_k)` with its grid frequency.
pub fn linf_norm_samples(values: &[CMatrix], grid: &FrequencyGrid) -> Result<NormResult> {
    if values.len() != grid.len() {
        return Err(Error::Dimension("sample count does not match grid".into()));
    }
    let (k, value) = values
        .par_iter()
        .map(linalg::sigma_max)
        .enumerate()
        .reduce(|| (0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a });
    Ok(NormResult {
        value,
        peak_frequency: grid.theta(k),
        method: NormMethod::Grid,
        interval: (value, f64::INFINITY),
    })
}

/// Grid estimate of `ess sup sigma_max(G(e^{j theta}))`; a lower bound.
pub fn linf_norm_grid(g: &StateSpace, grid: &FrequencyGrid) -> Result<NormResult> {
    let vals = g.sample(grid)?;
    linf_norm_samples(&vals, grid)
}

enum PencilTest {
    /// No unit-circle eigenvalues: `||G|| < gamma`.
    Below,
    /// Crossing angles found; carries the best probe value and its frequency.
    Crossing { best: f64, at: f64 },
}

struct Pencil<'a> {
    g: &'a StateSpace,
    dtd: DMatrix<f64>,
}

impl<'a> Pencil<'a> {
    fn new(g: &'a StateSpace) -> Self {
        Self {
            dtd: g.d().transpose() * g.d(),
            g,
        }
    }

    /// Eigenvalues of the symplectic pencil `z [[I,0],[Q,F']] - [[F,G],[0,I]]`
    /// where `R = gamma^2 I - D'D`, `F = A + B R^{-1} D'C`, `G = B R^{-1} B'`,
    /// `Q = C'(I + D R^{-1} D')C`. Its unit-modulus eigenvalues are the
    /// frequencies at which `gamma` is a singular value of `G(e^{j theta})`.
    fn eigenvalues(&self, gamma: f64) -> Result<Option<Vec<Complex64>>> {
        let (a, b, c, d) = (self.g.a(), self.g.b(), self.g.c(), self.g.d());
        let m = self.g.inputs();
        let n = self.g.order();
        let r = DMatrix::identity(m, m) * (gamma * gamma) - &self.dtd;
        if linalg::condition_number(&r) > MAX_PENCIL_COND {
            return Ok(None);
        }
        let rinv = match r.try_inverse() {
            Some(x) => x,
            None => return Ok(None),
        };
        let f = a + b * &rinv * d.transpose() * c;
        let gg = b * &rinv * b.transpose();
        let p = self.g.outputs();
        let q = c.transpose() * (DMatrix::identity(p, p) + d * &rinv * d.transpose()) * c;
        let mut e = DMatrix::zeros(2 * n, 2 * n);
        let mut mm = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            e[(i, i)] = 1.0;
            mm[(n + i, n + i)] = 1.0;
        }
        e.view_mut((n, 0), (n, n)).copy_from(&q);
        e.view_mut((n, n), (n, n)).copy_from(&f.transpose());
        mm.view_mut((0, 0), (n, n)).copy_from(&f);
        mm.view_mut((0, n), (n, n)).copy_from(&gg);
        linalg::generalized_eigenvalues(&mm, &e).map(Some)
    }

    fn test(&self, gamma: f64) -> Result<Option<PencilTest>> {
        let eig = match self.eigenvalues(gamma)? {
            Some(e) => e,
            None => return Ok(None),
        };
        let mut crossing = false;
        let mut angles: Vec<f64> = Vec::new();
        for z in &eig {
            let gap = (z.norm() - 1.0).abs();
            if gap <= PROBE_TOL {
                angles.push(z.arg());
                crossing |= gap <= UNIT_TOL;
            }
        }
        if angles.is_empty() {
            return Ok(Some(PencilTest::Below));
        }
        angles.sort_by(f64::total_cmp);
        angles.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
        let mut probes = angles.clone();
        for i in 0..angles.len() {
            let next = if i + 1 < angles.len() {
                angles[i + 1]
            } else {
                angles[0] + 2.0 * PI
            };
            probes.push(wrap(0.5 * (angles[i] + next)));
        }
        let mut best = f64::NEG_INFINITY;
        let mut at = 0.0;
        for t in probes {
            let s = sigma_at(self.g, t)?;
            if s > best {
                best = s;
                at = wrap(t);
            }
        }
        if crossing || best >= gamma {
            Ok(Some(PencilTest::Crossing { best, at }))
        } else {
            Ok(Some(PencilTest::Below))
        }
    }

    /// Runs [`Pencil::test`], nudging `gamma` up by `10 tol` (at most three
    /// times) when `gamma^2 I - D'D` is ill conditioned.
    fn test_with_retry(&self, gamma: f64, tol: f64) -> Result<(f64, PencilTest)> {
        let mut g = gamma;
        for _ in 0..=3 {
            if let Some(t) = self.test(g)? {
                return Ok((g, t));
            }
            g += 10.0 * tol * g.max(1.0);
        }
        Err(Error::IllConditioned { gamma })
    }
}

/// H-infinity norm of a stable system by bisection on the symplectic pencil,
/// with crossing-frequency probing to raise the lower bound. Terminates when
/// `hi - lo <= tol * max(1, lo)`.
pub fn hinf_norm(g: &StateSpace, tol: f64) -> Result<NormResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    g.require_stable()?;
    let d_sigma = linalg::sigma_max(&linalg::to_complex(g.d()));
    if g.order() == 0 {
        return Ok(NormResult {
            value: d_sigma,
            peak_frequency: 0.0,
            method: NormMethod::Bisection,
            interval: (d_sigma, d_sigma),
        });
    }

    // initial lower bound from a coarse grid that includes 0 and -pi
    let coarse = FrequencyGrid::new((16 * g.order()).clamp(64, 1024))?;
    let start = linf_norm_grid(g, &coarse)?;
    let mut lo = start.value;
    let mut peak = start.peak_frequency;
    if lo <= 0.0 && d_sigma <= 0.0 {
        return Ok(NormResult {
            value: 0.0,
            peak_frequency: 0.0,
            method: NormMethod::Bisection,
            interval: (0.0, 0.0),
        });
    }
    let pencil = Pencil::new(g);

    let raise = |lo: &mut f64, peak: &mut f64, gamma: f64, best: f64, at: f64| -> bool {
        let before = *lo;
        if best > *lo {
            *lo = best;
            *peak = at;
        }
        let helped = *lo >= gamma;
        if *lo < gamma {
            // a crossing certifies ||G|| >= gamma even if no probe reached it
            *lo = gamma;
            *peak = at;
        }
        helped && *lo > before
    };

    let mut gamma = 2.0 * lo.max(d_sigma).max(f64::MIN_POSITIVE);
    let hi;
    loop {
        let (used, t) = pencil.test_with_retry(gamma, tol)?;
        match t {
            PencilTest::Below => {
                hi = used;
                break;
            }
            PencilTest::Crossing { best, at } => {
                raise(&mut lo, &mut peak, used, best, at);
                gamma = 2.0 * used.max(lo);
            }
        }
        if !gamma.is_finite() {
            return Err(Error::Numerical("upper bound search diverged".into()));
        }
    }

    let mut hi = hi;
    let mut probing = true;
    for _ in 0..MAX_BISECTIONS {
        let width = tol * lo.max(1.0);
        if hi - lo <= width {
            return Ok(NormResult {
                value: lo,
                peak_frequency: peak,
                method: NormMethod::Bisection,
                interval: (lo, hi),
            });
        }
        let mid = 0.5 * (lo + hi);
        let gamma = if probing { (lo + 0.5 * width).min(mid) } else { mid };
        let (used, t) = pencil.test_with_retry(gamma, tol)?;
        match t {
            PencilTest::Below => {
                hi = hi.min(used);
                probing = true;
            }
            PencilTest::Crossing { best, at } => {
                probing = raise(&mut lo, &mut peak, used, best, at);
                if lo > hi {
                    hi = lo;
                }
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_BISECTIONS,
        residual: hi - lo,
    })
}

/// `||G||_{H2}^2 = tr(C P C') + tr(D D')` with `P = A P A' + B B'`.
pub fn h2_norm_sq(g: &StateSpace) -> Result<f64> {
    g.require_stable()?;
    let dd = (g.d() * g.d().transpose()).trace();
    if g.order() == 0 {
        return Ok(dd);
    }
    let p = linalg::solve_stein(g.a(), &(g.b() * g.b().transpose()))?;
    Ok((g.c() * p * g.c().transpose()).trace() + dd)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tf(num: &[f64], den: &[f64]) -> StateSpace {
        StateSpace::from_transfer_function(num, den).unwrap()
    }

    #[test]
    fn constant_norms() {
        let g = StateSpace::constant(DMatrix::from_element(1, 1, -2.5));
        let grid = FrequencyGrid::new(16).unwrap();
        assert_eq!(linf_norm_grid(&g, &grid).unwrap().value, 2.5);
        assert_eq!(hinf_norm(&StateSpace::identity(3), 1e-8).unwrap().value, 1.0);
        assert_eq!(h2_norm_sq(&StateSpace::identity(3)).unwrap(), 3.0);
    }

    #[test]
    fn example_ratio_grid_values() {
        let grid = FrequencyGrid::new(4096).unwrap();
        let r = linf_norm_grid(&tf(&[1.0, 1.0 / 3.0], &[1.0, -0.5]), &grid).unwrap();
        assert!((r.value - 8.0 / 3.0).abs() < 1e-14);
        assert!(r.peak_frequency.abs() < 1e-12);
        let r = linf_norm_grid(&tf(&[1.0, -0.5], &[1.0, 1.0 / 3.0]), &grid).unwrap();
        assert!((r.value - 9.0 / 4.0).abs() < 1e-14);
        assert!((r.peak_frequency.abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn hinf_examples() {
        let r = hinf_norm(&tf(&[1.0, 1.0 / 3.0], &[1.0, -0.5]), 1e-8).unwrap();
        assert!((r.value - 8.0 / 3.0).abs() <= 1e-8 * 8.0 / 3.0);
        assert!(r.interval.0 <= r.value && r.value <= r.interval.1);
        assert!(r.interval.1 - r.interval.0 <= 1e-8 * r.value.max(1.0));
        // 1/(z - 1/2) = z^{-1} / (1 - z^{-1}/2), peak 2 at theta = 0
        let r = hinf_norm(&tf(&[0.0, 1.0], &[1.0, -0.5]), 1e-8).unwrap();
        assert!((r.value - 2.0).abs() < 2e-8);
        assert!(r.peak_frequency.abs() < 1e-6);
    }

    #[test]
    fn hinf_off_grid_peak() {
        // resonant pair at angle 0.7123 rad, radius 0.97
        let (rad, ang) = (0.97f64, 0.7123f64);
        let g = tf(&[1.0], &[1.0, -2.0 * rad * ang.cos(), rad * rad]);
        let r = hinf_norm(&g, 1e-10).unwrap();
        let dense = linf_norm_grid(&g, &FrequencyGrid::new(1 << 18).unwrap()).unwrap();
        assert!(r.value >= dense.value * (1.0 - 1e-12));
        assert!((r.value - dense.value) / r.value < 1e-6);
    }

    #[test]
    fn unstable_rejected() {
        assert!(matches!(
            hinf_norm(&tf(&[1.0], &[1.0, -1.5]), 1e-8),
            Err(Error::Unstable { .. })
        ));
        assert!(matches!(h2_norm_sq(&tf(&[1.0], &[1.0, -1.5])), Err(Error::Unstable { .. })));
    }

    #[test]
    fn h2_examples() {
        let v = h2_norm_sq(&tf(&[0.0, 1.0], &[1.0, -0.5])).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-14);
        let v = h2_norm_sq(&tf(&[1.0, 1.0 / 3.0], &[1.0, -0.5])).unwrap();
        assert!((v - 52.0 / 27.0).abs() < 1e-14);
    }
}
