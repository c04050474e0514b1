use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::FrequencyGrid;
use crate::error::{Error, Result};
use crate::linalg::{self, to_complex, CMatrix};

/// Distance to the spectrum of `A` below which the resolvent is treated as singular.
pub const RESOLVENT_TOL: f64 = 1e-12;
/// Distance of a pole to the unit circle below which sampling refuses.
pub const CIRCLE_TOL: f64 = 1e-9;
/// Condition number above which `D` counts as singular.
pub const MAX_FEEDTHROUGH_COND: f64 = 1e12;

/// Discrete-time realization `G(z) = C (zI - A)^{-1} B + D`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    d: DMatrix<f64>,
}

impl StateSpace {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
    ) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension(format!("A is {}x{}", n, a.ncols())));
        }
        if b.nrows() != n || c.ncols() != n {
            return Err(Error::Dimension(format!(
                "A is {n}x{n} but B is {}x{} and C is {}x{}",
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols()
            )));
        }
        if d.nrows() != c.nrows() || d.ncols() != b.ncols() {
            return Err(Error::Dimension(format!(
                "D is {}x{}, expected {}x{}",
                d.nrows(),
                d.ncols(),
                c.nrows(),
                b.ncols()
            )));
        }
        if [&a, &b, &c, &d].iter().any(|m| m.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self { a, b, c, d })
    }

    /// Like [`StateSpace::new`] but also asserts every pole lies strictly
    /// inside the unit disk.
    pub fn new_stable(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
    ) -> Result<Self> {
        let sys = Self::new(a, b, c, d)?;
        sys.require_stable()?;
        Ok(sys)
    }

    pub fn constant(d: DMatrix<f64>) -> Self {
        let (p, m) = d.shape();
        Self {
            a: DMatrix::zeros(0, 0),
            b: DMatrix::zeros(0, m),
            c: DMatrix::zeros(p, 0),
            d,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(DMatrix::identity(n, n))
    }

    /// SISO realization of `num(z^{-1}) / den(z^{-1})` in controllable
    /// canonical form; both polynomials are in ascending powers of `z^{-1}`.
    pub fn from_transfer_function(num: &[f64], den: &[f64]) -> Result<Self> {
        let a0 = *den
            .first()
            .ok_or_else(|| Error::InvalidInput("empty denominator".into()))?;
        if a0 == 0.0 {
            return Err(Error::InvalidInput(
                "denominator must have a nonzero constant term (causal, proper)".into(),
            ));
        }
        let n = num.len().max(den.len()).saturating_sub(1);
        let coef = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0) / a0;
        let b0 = coef(num, 0);
        let mut a = DMatrix::zeros(n, n);
        let mut c = DMatrix::zeros(1, n);
        for k in 0..n {
            a[(0, k)] = -coef(den, k + 1);
            c[(0, k)] = coef(num, k + 1) - b0 * coef(den, k + 1);
            if k + 1 < n {
                a[(k + 1, k)] = 1.0;
            }
        }
        let mut b = DMatrix::zeros(n, 1);
        if n > 0 {
            b[(0, 0)] = 1.0;
        }
        Self::new(a, b, c, DMatrix::from_element(1, 1, b0))
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }
    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }
    pub fn order(&self) -> usize {
        self.a.nrows()
    }
    pub fn outputs(&self) -> usize {
        self.d.nrows()
    }
    pub fn inputs(&self) -> usize {
        self.d.ncols()
    }
    pub fn is_square(&self) -> bool {
        self.inputs() == self.outputs()
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        linalg::eigenvalues(&self.a)
    }

    /// Invariant zeros: eigenvalues of `A - B D^{-1} C` when `D` is
    /// invertible; otherwise the finite zeros of the Rosenbrock pencil.
    pub fn zeros(&self) -> Result<Vec<Complex64>> {
        if !self.is_square() {
            return Err(Error::Dimension("zeros require a square system".into()));
        }
        match self.inverse() {
            Ok(inv) => inv.poles(),
            Err(Error::SingularFeedthrough { .. }) => self.pencil_zeros(),
            Err(e) => Err(e),
        }
    }

    fn pencil_zeros(&self) -> Result<Vec<Complex64>> {
        let n = self.order();
        let m = self.inputs();
        let mut big = DMatrix::zeros(n + m, n + m);
        big.view_mut((0, 0), (n, n)).copy_from(&self.a);
        big.view_mut((0, n), (n, m)).copy_from(&self.b);
        big.view_mut((n, 0), (m, n)).copy_from(&self.c);
        big.view_mut((n, n), (m, m)).copy_from(&self.d);
        let mut e = DMatrix::zeros(n + m, n + m);
        for i in 0..n {
            e[(i, i)] = 1.0;
        }
        linalg::generalized_eigenvalues(&big, &e)
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        Ok(self.poles()?.iter().map(|p| p.norm()).fold(0.0, f64::max))
    }

    pub fn is_stable(&self) -> Result<bool> {
        Ok(self.spectral_radius()? < 1.0)
    }

    pub fn require_stable(&self) -> Result<()> {
        let radius = self.spectral_radius()?;
        if radius < 1.0 {
            Ok(())
        } else {
            Err(Error::Unstable { radius })
        }
    }

    pub(crate) fn evaluate_unchecked(&self, z: Complex64) -> Result<CMatrix> {
        let mut out = to_complex(&self.d);
        let n = self.order();
        if n == 0 {
            return Ok(out);
        }
        let mut resolvent = to_complex(&self.a) * Complex64::new(-1.0, 0.0);
        for i in 0..n {
            resolvent[(i, i)] += z;
        }
        let x = resolvent
            .lu()
            .solve(&to_complex(&self.b))
            .ok_or(Error::SingularResolvent { z })?;
        out += to_complex(&self.c) * x;
        Ok(out)
    }

    /// `C (zI - A)^{-1} B + D` at a single point.
    pub fn evaluate(&self, z: Complex64) -> Result<CMatrix> {
        if self.order() > 0 {
            let gap = self
                .poles()?
                .iter()
                .map(|p| (p - z).norm())
                .fold(f64::INFINITY, f64::min);
            if gap <= RESOLVENT_TOL {
                return Err(Error::SingularResolvent { z });
            }
        }
        self.evaluate_unchecked(z)
    }

    pub fn check_no_pole_on_circle(&self) -> Result<()> {
        for p in self.poles()? {
            if (p.norm() - 1.0).abs() <= CIRCLE_TOL {
                return Err(Error::PoleOnCircle { pole: p });
            }
        }
        Ok(())
    }

    /// `G(e^{j theta_k})` at every grid point, in grid order.
    pub fn sample(&self, grid: &FrequencyGrid) -> Result<Vec<CMatrix>> {
        self.check_no_pole_on_circle()?;
        self.sample_thetas(&grid.thetas())
    }

    pub(crate) fn sample_thetas(&self, thetas: &[f64]) -> Result<Vec<CMatrix>> {
        thetas
            .par_iter()
            .map(|&t| self.evaluate_unchecked(Complex64::from_polar(1.0, t)))
            .collect()
    }

    /// Product `self * other` (`other` acts first).
    pub fn series(&self, other: &StateSpace) -> Result<StateSpace> {
        if self.inputs() != other.outputs() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.outputs(),
                self.inputs(),
                other.outputs(),
                other.inputs()
            )));
        }
        let (n1, n2) = (self.order(), other.order());
        let n = n1 + n2;
        let mut a = DMatrix::zeros(n, n);
        a.view_mut((0, 0), (n1, n1)).copy_from(&self.a);
        a.view_mut((0, n1), (n1, n2)).copy_from(&(&self.b * &other.c));
        a.view_mut((n1, n1), (n2, n2)).copy_from(&other.a);
        let mut b = DMatrix::zeros(n, other.inputs());
        b.view_mut((0, 0), (n1, other.inputs()))
            .copy_from(&(&self.b * &other.d));
        b.view_mut((n1, 0), (n2, other.inputs())).copy_from(&other.b);
        let mut c = DMatrix::zeros(self.outputs(), n);
        c.view_mut((0, 0), (self.outputs(), n1)).copy_from(&self.c);
        c.view_mut((0, n1), (self.outputs(), n2))
            .copy_from(&(&self.d * &other.c));
        let d = &self.d * &other.d;
        StateSpace::new(a, b, c, d)
    }

    /// Sum `self + other`.
    pub fn add(&self, other: &StateSpace) -> Result<StateSpace> {
        if self.d.shape() != other.d.shape() {
            return Err(Error::Dimension("added systems differ in shape".into()));
        }
        let (n1, n2) = (self.order(), other.order());
        let (p, m) = self.d.shape();
        let mut a = DMatrix::zeros(n1 + n2, n1 + n2);
        a.view_mut((0, 0), (n1, n1)).copy_from(&self.a);
        a.view_mut((n1, n1), (n2, n2)).copy_from(&other.a);
        let mut b = DMatrix::zeros(n1 + n2, m);
        b.view_mut((0, 0), (n1, m)).copy_from(&self.b);
        b.view_mut((n1, 0), (n2, m)).copy_from(&other.b);
        let mut c = DMatrix::zeros(p, n1 + n2);
        c.view_mut((0, 0), (p, n1)).copy_from(&self.c);
        c.view_mut((0, n1), (p, n2)).copy_from(&other.c);
        StateSpace::new(a, b, c, &self.d + &other.d)
    }

    /// Realization of `G^{-1}`: `(A - B D^{-1} C, B D^{-1}, -D^{-1} C, D^{-1})`.
    pub fn inverse(&self) -> Result<StateSpace> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse requires a square system".into()));
        }
        let cond = linalg::condition_number(&self.d);
        if !(cond < MAX_FEEDTHROUGH_COND) {
            return Err(Error::SingularFeedthrough { cond });
        }
        let dinv = self
            .d
            .clone()
            .try_inverse()
            .ok_or(Error::SingularFeedthrough { cond })?;
        let bd = &self.b * &dinv;
        let a = &self.a - &bd * &self.c;
        let c = -(&dinv * &self.c);
        StateSpace::new(a, bd, c, dinv)
    }

    /// Right multiplication by a constant matrix.
    pub fn scale_input(&self, k: &DMatrix<f64>) -> Result<StateSpace> {
        StateSpace::new(self.a.clone(), &self.b * k, self.c.clone(), &self.d * k)
    }

    /// Scalar multiple `k G`.
    pub fn scale(&self, k: f64) -> StateSpace {
        StateSpace {
            a: self.a.clone(),
            b: self.b.clone(),
            c: &self.c * k,
            d: &self.d * k,
        }
    }

    /// Horizontal concatenation `[G1, G2]` (shared output).
    pub fn hstack(&self, other: &StateSpace) -> Result<StateSpace> {
        if self.outputs() != other.outputs() {
            return Err(Error::Dimension("hstack requires equal output counts".into()));
        }
        let (n1, n2) = (self.order(), other.order());
        let (m1, m2) = (self.inputs(), other.inputs());
        let p = self.outputs();
        let mut a = DMatrix::zeros(n1 + n2, n1 + n2);
        a.view_mut((0, 0), (n1, n1)).copy_from(&self.a);
        a.view_mut((n1, n1), (n2, n2)).copy_from(&other.a);
        let mut b = DMatrix::zeros(n1 + n2, m1 + m2);
        b.view_mut((0, 0), (n1, m1)).copy_from(&self.b);
        b.view_mut((n1, m1), (n2, m2)).copy_from(&other.b);
        let mut c = DMatrix::zeros(p, n1 + n2);
        c.view_mut((0, 0), (p, n1)).copy_from(&self.c);
        c.view_mut((0, n1), (p, n2)).copy_from(&other.c);
        let mut d = DMatrix::zeros(p, m1 + m2);
        d.view_mut((0, 0), (p, m1)).copy_from(&self.d);
        d.view_mut((0, m1), (p, m2)).copy_from(&other.d);
        StateSpace::new(a, b, c, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w1() -> StateSpace {
        // z / (z - 1/2) = 1 / (1 - 0.5 z^{-1})
        StateSpace::from_transfer_function(&[1.0], &[1.0, -0.5]).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_evaluates_to_d() {
        let g = StateSpace::constant(DMatrix::from_element(1, 1, 3.0));
        let v = g.evaluate(c(0.0, 1.0)).unwrap();
        assert_eq!(v[(0, 0)], c(3.0, 0.0));
    }

    #[test]
    fn w1_hand_values() {
        let g = w1();
        assert!((g.evaluate(c(1.0, 0.0)).unwrap()[(0, 0)] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((g.evaluate(c(-1.0, 0.0)).unwrap()[(0, 0)] - c(2.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn evaluate_at_pole_fails() {
        assert!(matches!(
            w1().evaluate(c(0.5, 0.0)),
            Err(Error::SingularResolvent { .. })
        ));
    }

    #[test]
    fn sample_grid_points() {
        let grid = FrequencyGrid::new(4).unwrap();
        let id = StateSpace::identity(2).sample(&grid).unwrap();
        assert_eq!(id.len(), 4);
        assert!(id.iter().all(|m| *m == CMatrix::identity(2, 2)));

        let vals = w1().sample(&grid).unwrap();
        // theta_0 = -pi, theta_2 = 0
        assert!((vals[0][(0, 0)] - c(2.0 / 3.0, 0.0)).norm() < 1e-14);
        assert!((vals[2][(0, 0)] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn sample_rejects_pole_on_circle() {
        let g = StateSpace::from_transfer_function(&[1.0], &[1.0, -1.0]).unwrap();
        let grid = FrequencyGrid::new(8).unwrap();
        assert!(matches!(g.sample(&grid), Err(Error::PoleOnCircle { .. })));
    }

    #[test]
    fn inverse_examples() {
        let k = StateSpace::constant(DMatrix::from_element(1, 1, 2.0)).inverse().unwrap();
        assert_eq!(k.d()[(0, 0)], 0.5);
        assert_eq!(k.order(), 0);

        // inverse of 1/(1 - 0.5 z^{-1}) is 1 - 0.5 z^{-1}
        let inv = w1().inverse().unwrap();
        for z in [c(1.3, 0.2), c(-0.4, 2.0), c(0.0, -1.0)] {
            let expect = c(1.0, 0.0) - c(0.5, 0.0) / z;
            assert!((inv.evaluate(z).unwrap()[(0, 0)] - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn inverse_of_strictly_proper_fails() {
        let g = StateSpace::from_transfer_function(&[0.0, 1.0], &[1.0, -0.5]).unwrap();
        assert!(matches!(g.inverse(), Err(Error::SingularFeedthrough { .. })));
    }

    #[test]
    fn poles_and_zeros() {
        let g = w1();
        let p = g.poles().unwrap();
        let z = g.zeros().unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!(z[0].norm() < 1e-15);

        let k = StateSpace::identity(3);
        assert!(k.poles().unwrap().is_empty());
        assert!(k.zeros().unwrap().is_empty());

        // (z + 1/3)/(z - 1/2) = (1 + z^{-1}/3)/(1 - z^{-1}/2)
        let r = StateSpace::from_transfer_function(&[1.0, 1.0 / 3.0], &[1.0, -0.5]).unwrap();
        assert!((r.poles().unwrap()[0] - c(0.5, 0.0)).norm() < 1e-14);
        assert!((r.zeros().unwrap()[0] - c(-1.0 / 3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pencil_zeros_for_strictly_proper() {
        // z^{-1}(1 + 0.25 z^{-1}) / (1 - 0.5 z^{-1}) has finite zero -0.25
        let g = StateSpace::from_transfer_function(&[0.0, 1.0, 0.25], &[1.0, -0.5]).unwrap();
        let z = g.zeros().unwrap();
        assert!(z.iter().any(|z| (z - c(-0.25, 0.0)).norm() < 1e-10), "{z:?}");
    }
}
