use std::f64::consts::PI;

use super::{ArModel, AudioSignal, MorphConfig};
use crate::error::{Error, Result};
use crate::rational::{LaurentPolynomial, ScalarRationalSpectrum};

/// `y[t] = x[t] - mu x[t-1]`.
pub fn preemphasis(x: &AudioSignal, mu: f64) -> AudioSignal {
    let mut prev = 0.0;
    let samples = x
        .samples
        .iter()
        .map(|&s| {
            let y = s - mu * prev;
            prev = s;
            y
        })
        .collect();
    AudioSignal {
        samples,
        sample_rate: x.sample_rate,
    }
}

/// `x[t] = y[t] + mu x[t-1]`, the inverse of [`preemphasis`].
pub fn deemphasis(y: &AudioSignal, mu: f64) -> AudioSignal {
    let mut prev = 0.0;
    let samples = y
        .samples
        .iter()
        .map(|&s| {
            prev = s + mu * prev;
            prev
        })
        .collect();
    AudioSignal {
        samples,
        sample_rate: y.sample_rate,
    }
}

pub fn hamming(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    (0..len)
        .map(|t| 0.54 - 0.46 * (2.0 * PI * t as f64 / (len - 1) as f64).cos())
        .collect()
}

/// Number of full frames, or an error when the signal is shorter than one.
pub fn frame_count(n: usize, cfg: &MorphConfig, fs: u32) -> Result<usize> {
    let len = cfg.frame_len(fs);
    if len < 2 || n < len {
        return Err(Error::InvalidInput(format!(
            "signal of {n} samples is shorter than one {len}-sample frame"
        )));
    }
    Ok((n - len) / cfg.hop_len(fs) + 1)
}

/// Unwindowed frames.
pub fn frames(x: &AudioSignal, cfg: &MorphConfig) -> Result<Vec<Vec<f64>>> {
    let count = frame_count(x.len(), cfg, x.sample_rate)?;
    let (len, hop) = (cfg.frame_len(x.sample_rate), cfg.hop_len(x.sample_rate));
    Ok((0..count).map(|i| x.samples[i * hop..i * hop + len].to_vec()).collect())
}

/// Hamming-windowed frames.
pub fn frame_and_window(x: &AudioSignal, cfg: &MorphConfig) -> Result<Vec<Vec<f64>>> {
    let w = hamming(cfg.frame_len(x.sample_rate));
    Ok(frames(x, cfg)?
        .into_iter()
        .map(|f| f.iter().zip(&w).map(|(s, w)| s * w).collect())
        .collect())
}

/// Biased lags `r_k = sum_t x[t] x[t+k]` for `k = 0..=p`.
pub fn autocorrelation(frame: &[f64], p: usize) -> Vec<f64> {
    (0..=p)
        .map(|k| {
            if k >= frame.len() {
                0.0
            } else {
                frame.iter().zip(&frame[k..]).map(|(a, b)| a * b).sum()
            }
        })
        .collect()
}

/// Solves the Yule-Walker equations for `r_0..r_p` by the order recursion.
///
/// Fails with [`Error::DegenerateFrame`] when `r_0 <= 0` or a reflection
/// coefficient reaches the unit circle.
pub fn levinson_durbin(r: &[f64]) -> Result<ArModel> {
    let r0 = *r
        .first()
        .ok_or_else(|| Error::InvalidInput("empty autocorrelation".into()))?;
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::DegenerateFrame(format!("r0 = {r0}")));
    }
    let p = r.len() - 1;
    let mut a = vec![1.0];
    let mut err = r0;
    for i in 1..=p {
        let acc: f64 = r[i] + (1..i).map(|j| a[j] * r[i - j]).sum::<f64>();
        let k = -acc / err;
        if !(k.abs() < 1.0) {
            return Err(Error::DegenerateFrame(format!("reflection coefficient {k} at order {i}")));
        }
        let prev = a.clone();
        a.push(k);
        for j in 1..i {
            a[j] = prev[j] + k * prev[i - j];
        }
        err *= 1.0 - k * k;
    }
    if !(err > 0.0) {
        return Err(Error::DegenerateFrame("zero prediction error".into()));
    }
    ArModel::new(a, err.sqrt())
}

/// `sigma^2 / |a(e^{j theta})|^2`.
pub fn ar_spectrum(model: &ArModel) -> ScalarRationalSpectrum {
    ScalarRationalSpectrum {
        num: LaurentPolynomial::constant(model.gain * model.gain),
        den: LaurentPolynomial::from_factor(&model.a),
    }
}
