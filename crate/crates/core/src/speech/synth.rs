use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{AudioSignal, MorphConfig};
use crate::error::{Error, Result};
use crate::rational::TransferFunction;

/// Direct-form II transposed state, kept across frames so that switching
/// coefficients does not restart the filter.
#[derive(Debug, Clone, Default)]
pub struct FilterState {
    z: Vec<f64>,
}

impl FilterState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Filters one sample through `num / den` (`den[0]` need not be 1).
    pub fn step(&mut self, tf: &TransferFunction, x: f64) -> f64 {
        let order = tf.num.len().max(tf.den.len()) - 1;
        if self.z.len() < order {
            self.z.resize(order, 0.0);
        }
        let a0 = tf.den[0];
        let b = |i: usize| tf.num.get(i).copied().unwrap_or(0.0) / a0;
        let a = |i: usize| tf.den.get(i).copied().unwrap_or(0.0) / a0;
        let y = b(0) * x + self.z.first().copied().unwrap_or(0.0);
        let n = self.z.len();
        for i in 0..n {
            let next = if i + 1 < n { self.z[i + 1] } else { 0.0 };
            self.z[i] = b(i + 1) * x - a(i + 1) * y + next;
        }
        y
    }
}

/// Filters a pulse-train (voiced) or white-noise (unvoiced) excitation
/// through one factor per hop-length segment.
///
/// Pulses are unit impulses `round(fs / pitch)` samples apart, with the pulse
/// phase carried from frame to frame; noise is unit-variance Gaussian from a
/// ChaCha stream seeded by `cfg.seed`. When `cfg.rms` is set the output is
/// scaled to that RMS.
pub fn synthesize(
    factors: &[TransferFunction],
    pitches: &[Option<f64>],
    fs: u32,
    cfg: &MorphConfig,
) -> Result<AudioSignal> {
    if factors.len() != pitches.len() {
        return Err(Error::Dimension(format!(
            "{} factors but {} pitch values",
            factors.len(),
            pitches.len()
        )));
    }
    let hop = cfg.hop_len(fs);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = FilterState::new();
    let mut countdown = 0usize;
    let mut out = Vec::with_capacity(hop * factors.len());
    for (tf, pitch) in factors.iter().zip(pitches) {
        let period = pitch.map(|p| ((fs as f64 / p).round() as usize).max(1));
        if let Some(p) = period {
            countdown = countdown.min(p);
        }
        for _ in 0..hop {
            let x = match period {
                Some(p) => {
                    let v = if countdown == 0 {
                        countdown = p;
                        1.0
                    } else {
                        0.0
                    };
                    countdown -= 1;
                    v
                }
                None => StandardNormal.sample(&mut rng),
            };
            out.push(state.step(tf, x));
        }
    }
    let mut signal = AudioSignal::new(out, fs)?;
    if let Some(target) = cfg.rms {
        let rms = signal.rms();
        if rms > 0.0 {
            signal.samples.iter_mut().for_each(|x| *x *= target / rms);
        }
    }
    Ok(signal)
}
