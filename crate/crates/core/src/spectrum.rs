//! A spectral density in one of its three concrete representations.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::rational::{
    FrequencyGrid, SampledSpectrum, ScalarRationalSpectrum, StateSpace, TransferFunction,
};

#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    /// `Phi = W W*` for a stable realization `W` (any factor, not necessarily
    /// minimum-phase).
    Factor(StateSpace),
    /// Scalar ratio of symmetric Laurent polynomials.
    Scalar(ScalarRationalSpectrum),
    /// Values on a frequency grid.
    Sampled(SampledSpectrum),
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        match self {
            Spectrum::Factor(w) => w.outputs(),
            Spectrum::Scalar(_) => 1,
            Spectrum::Sampled(s) => s.dim(),
        }
    }

    pub fn is_rational(&self) -> bool {
        !matches!(self, Spectrum::Sampled(_))
    }

    /// Values `Phi(e^{j theta_k})`. Sampled spectra must already live on `grid`.
    pub fn sample(&self, grid: &FrequencyGrid) -> Result<SampledSpectrum> {
        match self {
            Spectrum::Factor(w) => {
                let vals = w
                    .sample(grid)?
                    .into_iter()
                    .map(|g| {
                        let phi = &g * g.adjoint();
                        (&phi + phi.adjoint()) * Complex64::new(0.5, 0.0)
                    })
                    .collect();
                Ok(SampledSpectrum::from_parts_unchecked(*grid, vals))
            }
            Spectrum::Scalar(s) => s.sample(grid),
            Spectrum::Sampled(s) => {
                if s.grid() != grid {
                    return Err(Error::Dimension(format!(
                        "sampled spectrum has {} points, requested grid has {}",
                        s.grid().len(),
                        grid.len()
                    )));
                }
                Ok(s.clone())
            }
        }
    }

    /// `c Phi` for `c > 0`.
    pub fn scale(&self, c: f64) -> Spectrum {
        match self {
            Spectrum::Factor(w) => Spectrum::Factor(w.scale(c.sqrt())),
            Spectrum::Scalar(s) => Spectrum::Scalar(s.scale(c)),
            Spectrum::Sampled(s) => Spectrum::Sampled(s.scale(c)),
        }
    }

    /// `T Phi T*` for a stable square filter `T`.
    pub fn filter(&self, t: &StateSpace) -> Result<Spectrum> {
        match self {
            Spectrum::Factor(w) => Ok(Spectrum::Factor(t.series(w)?)),
            Spectrum::Scalar(s) => {
                let tf = siso_transfer_function(t)?;
                let ts = tf.spectrum();
                Ok(Spectrum::Scalar(ScalarRationalSpectrum {
                    num: s.num.multiply(&ts.num),
                    den: s.den.multiply(&ts.den),
                }))
            }
            Spectrum::Sampled(s) => {
                let tv = t.sample(s.grid())?;
                let vals: Vec<CMatrix> = s
                    .values()
                    .iter()
                    .zip(&tv)
                    .map(|(p, g)| g * p * g.adjoint())
                    .collect();
                SampledSpectrum::new(*s.grid(), vals).map(Spectrum::Sampled)
            }
        }
    }
}

/// Recovers `num/den` of a SISO realization from its poles, zeros and gain.
fn siso_transfer_function(t: &StateSpace) -> Result<TransferFunction> {
    if t.inputs() != 1 || t.outputs() != 1 {
        return Err(Error::Dimension("scalar spectra need a scalar filter".into()));
    }
    let poles = t.poles()?;
    let zeros = t.zeros()?;
    let n = poles.len();
    // z-polynomials (ascending) -> z^{-1} form: reverse and pad to length n+1
    let mut den = crate::poly::reversed(&crate::poly::from_roots(&poles));
    let mut num = crate::poly::reversed(&crate::poly::from_roots(&zeros));
    den.resize(n + 1, 0.0);
    num.resize(n + 1, 0.0);
    // shift numerator by the relative degree
    let rel = n - zeros.len();
    num.rotate_right(rel);
    let probe = Complex64::new(1.7, 0.3);
    let raw = TransferFunction::new(num.clone(), den.clone())?.eval(probe);
    let target = t.evaluate(probe)?[(0, 0)];
    let k = (target / raw).re;
    TransferFunction::new(num.iter().map(|x| x * k).collect(), den)
}

impl From<StateSpace> for Spectrum {
    fn from(w: StateSpace) -> Self {
        Spectrum::Factor(w)
    }
}

impl From<ScalarRationalSpectrum> for Spectrum {
    fn from(s: ScalarRationalSpectrum) -> Self {
        Spectrum::Scalar(s)
    }
}

impl From<SampledSpectrum> for Spectrum {
    fn from(s: SampledSpectrum) -> Self {
        Spectrum::Sampled(s)
    }
}
