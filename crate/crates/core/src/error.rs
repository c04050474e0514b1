use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("resolvent is singular: z = {z} lies on the spectrum of A")]
    SingularResolvent { z: Complex64 },

    #[error("pole on the unit circle at {pole} (|p| = {})", pole.norm())]
    PoleOnCircle { pole: Complex64 },

    #[error("feedthrough matrix D is singular or ill-conditioned (cond = {cond:.3e})")]
    SingularFeedthrough { cond: f64 },

    #[error("system is unstable: spectral radius {radius}")]
    Unstable { radius: f64 },

    #[error("degenerate polynomial: {0}")]
    DegeneratePolynomial(String),

    #[error("root on the unit circle at {root} (||r| - 1| = {:.3e})", (root.norm() - 1.0).abs())]
    BoundaryRoot { root: Complex64 },

    #[error("spectrum is not positive: {0}")]
    NotPositive(String),

    #[error("spectrum is rank deficient: {0}")]
    UnsupportedRank(String),

    #[error("iteration did not converge after {iterations} steps (last change {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("ill-conditioned pencil at gamma = {gamma}")]
    IllConditioned { gamma: f64 },

    #[error("degenerate analysis frame: {0}")]
    DegenerateFrame(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("wav: {0}")]
    Wav(#[from] hound::Error),
}

impl Error {
    /// True for errors caused by malformed or out-of-domain input, as opposed
    /// to a numerical routine failing on valid input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Dimension(_)
                | Error::NotPositive(_)
                | Error::UnsupportedRank(_)
                | Error::InvalidInput(_)
                | Error::Unstable { .. }
                | Error::PoleOnCircle { .. }
                | Error::DegeneratePolynomial(_)
                | Error::Io(_)
                | Error::Json(_)
                | Error::Wav(_)
        )
    }
}
