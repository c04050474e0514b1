//! Conal (Thompson and Hilbert) distances between rational spectral
//! densities, their Finsler geodesics, and an LPC speech-morphing pipeline
//! built on them.
//!
//! The distances reduce to two classical computations: the minimum-phase
//! spectral factors `W1`, `W2` of the two spectra ([`factorization`]) and the
//! H-infinity norms of `W2^{-1} W1` and `W1^{-1} W2` ([`norms`]). Every
//! distance also has a frequency-grid evaluation that works for arbitrary
//! sampled spectra and serves as an independent cross-check.

pub mod error;
pub mod factorization;
pub mod geodesic;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod norms;
pub mod poly;
pub mod rational;
pub mod spectrum;
pub mod speech;

pub use error::{Error, Result};
pub use factorization::{minimum_phase_factor, FactorOptions, FactoredSpectrum};
pub use geodesic::{
    finsler_geodesic, hilbert_geodesic, normalize_spectrum, riemannian_geodesic, GeodesicPoint,
    GeodesicSpec,
};
pub use metrics::{
    frobenius_divergence, hilbert_distance, riemannian_distance, thompson_distance,
    DistanceResult, EvalPath, MetricOptions,
};
pub use norms::{h2_norm_sq, hinf_norm, NormMethod, NormResult};
pub use rational::{
    FrequencyGrid, LaurentPolynomial, SampledSpectrum, ScalarRationalSpectrum, StateSpace,
    TransferFunction,
};
pub use spectrum::Spectrum;
pub use speech::{morph, ArModel, AudioSignal, MorphConfig};
