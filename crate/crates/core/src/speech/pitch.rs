use super::{ArModel, MorphConfig, PitchMode};

/// Residual-autocorrelation pitch in Hz, or `None` for unvoiced frames.
///
/// The unwindowed frame is inverse filtered by `a(z)`; the residual's
/// autocorrelation peak over lags `[fs/max_pitch, fs/min_pitch]` gives the
/// period, and the frame is voiced when that peak is at least
/// `voicing_threshold * r_0`.
pub fn estimate_pitch(frame: &[f64], model: &ArModel, fs: u32, cfg: &MorphConfig) -> Option<f64> {
    let fs = fs as f64;
    let residual: Vec<f64> = (0..frame.len())
        .map(|t| {
            model
                .a
                .iter()
                .enumerate()
                .take(t + 1)
                .map(|(j, a)| a * frame[t - j])
                .sum()
        })
        .collect();
    let lo = (fs / cfg.max_pitch).ceil() as usize;
    let hi = ((fs / cfg.min_pitch).floor() as usize).min(residual.len().saturating_sub(1));
    if lo == 0 || lo > hi {
        return None;
    }
    let r0: f64 = residual.iter().map(|x| x * x).sum();
    if !(r0 > 0.0) {
        return None;
    }
    let (lag, peak) = (lo..=hi)
        .map(|k| (k, residual.iter().zip(&residual[k..]).map(|(a, b)| a * b).sum::<f64>()))
        .fold((0, f64::NEG_INFINITY), |best, x| if x.1 > best.1 { x } else { best });
    (peak / r0 >= cfg.voicing_threshold).then(|| fs / lag as f64)
}

pub fn interpolate_pitch(pa: f64, pb: f64, tau: f64, mode: PitchMode) -> f64 {
    match mode {
        PitchMode::Linear => (1.0 - tau) * pa + tau * pb,
        PitchMode::Geometric => pa.powf(1.0 - tau) * pb.powf(tau),
    }
}
