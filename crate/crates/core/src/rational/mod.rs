//! Rational matrix functions, Laurent polynomials and frequency-grid sampling.

mod grid;
mod laurent;
mod sampled;
mod scalar;
mod state_space;

pub use grid::{FrequencyGrid, DEFAULT_GRID_SIZE};
pub use laurent::LaurentPolynomial;
pub use sampled::SampledSpectrum;
pub use scalar::{ScalarRationalSpectrum, TransferFunction};
pub use state_space::{StateSpace, CIRCLE_TOL, MAX_FEEDTHROUGH_COND, RESOLVENT_TOL};
