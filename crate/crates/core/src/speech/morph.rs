use rayon::prelude::*;

use super::{
    ar_spectrum, autocorrelation, deemphasis, estimate_pitch, frame_and_window, frames,
    interpolate_pitch, levinson_durbin, preemphasis, synthesize, ArModel, AudioSignal,
    MorphConfig,
};
use crate::error::{Error, Result};
use crate::factorization::FactoredSpectrum;
use crate::geodesic::{finsler_geodesic, GeodesicPoint, GeodesicSpec};
use crate::metrics::MetricOptions;
use crate::rational::FrequencyGrid;
use crate::spectrum::Spectrum;

/// Gain of the flat model standing in for silent frames at the start.
pub const SILENT_GAIN: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct FrameAnalysis {
    pub model: ArModel,
    pub pitch: Option<f64>,
    /// The frame was degenerate and carries its predecessor's model.
    pub substituted: bool,
}

#[derive(Debug, Clone)]
pub struct MorphFrame {
    pub factor: FactoredSpectrum,
    pub pitch: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct MorphResult {
    pub signal: AudioSignal,
    pub frames: Vec<MorphFrame>,
    pub analysis_a: Vec<FrameAnalysis>,
    pub analysis_b: Vec<FrameAnalysis>,
}

/// LPC analysis of every frame: pre-emphasis, windowing, autocorrelation,
/// Levinson-Durbin and residual pitch.
pub fn analyze(x: &AudioSignal, cfg: &MorphConfig) -> Result<Vec<FrameAnalysis>> {
    cfg.validate()?;
    let len = cfg.frame_len(x.sample_rate);
    if cfg.order >= len {
        return Err(Error::InvalidInput(format!(
            "AR order {} needs frames longer than {len} samples",
            cfg.order
        )));
    }
    let pre = preemphasis(x, cfg.preemphasis);
    let raw = frames(&pre, cfg)?;
    let windowed = frame_and_window(&pre, cfg)?;
    let fits: Vec<Result<ArModel>> = windowed
        .par_iter()
        .map(|w| levinson_durbin(&autocorrelation(w, cfg.order)))
        .collect();
    let mut models = Vec::with_capacity(fits.len());
    let mut prev: Option<ArModel> = None;
    for fit in fits {
        let (model, substituted) = match fit {
            Ok(m) => (m, false),
            Err(Error::DegenerateFrame(_)) => (prev.clone().unwrap_or_else(|| ArModel::flat(SILENT_GAIN)), true),
            Err(e) => return Err(e),
        };
        prev = Some(model.clone());
        models.push((model, substituted));
    }
    Ok(models
        .into_par_iter()
        .zip(raw.par_iter())
        .map(|((model, substituted), frame)| FrameAnalysis {
            pitch: estimate_pitch(frame, &model, x.sample_rate, cfg),
            model,
            substituted,
        })
        .collect())
}

/// Point `tau` of the Finsler geodesic between two AR spectra, as a scalar
/// minimum-phase factor over the denominator `a_A a_B`.
pub fn morph_frame(a: &ArModel, b: &ArModel, tau: f64, opts: &MetricOptions) -> Result<FactoredSpectrum> {
    let spec = GeodesicSpec::new(
        Spectrum::Scalar(ar_spectrum(a)),
        Spectrum::Scalar(ar_spectrum(b)),
        opts,
    )?;
    match finsler_geodesic(&spec, tau)? {
        GeodesicPoint::Factored(f) if f.scalar().is_some() => Ok(f),
        _ => Err(Error::Numerical("AR spectra could not be factored".into())),
    }
}

fn frame_pitch(pa: Option<f64>, pb: Option<f64>, cfg: &MorphConfig) -> Option<f64> {
    match (pa, pb) {
        (Some(x), Some(y)) => {
            Some(interpolate_pitch(x, y, cfg.tau, cfg.pitch_mode).clamp(cfg.min_pitch, cfg.max_pitch))
        }
        // mixed voicing follows the nearer endpoint
        _ if cfg.tau <= 0.5 => pa,
        _ => pb,
    }
}

/// Morphs speaker A towards speaker B at `cfg.tau`. Frames are paired by
/// index and the longer recording is truncated.
pub fn morph(a: &AudioSignal, b: &AudioSignal, cfg: &MorphConfig) -> Result<MorphResult> {
    if a.sample_rate != b.sample_rate {
        return Err(Error::InvalidInput(format!(
            "sample rates differ: {} Hz and {} Hz",
            a.sample_rate, b.sample_rate
        )));
    }
    let mut analysis_a = analyze(a, cfg)?;
    let mut analysis_b = analyze(b, cfg)?;
    let n = analysis_a.len().min(analysis_b.len());
    analysis_a.truncate(n);
    analysis_b.truncate(n);
    let opts = MetricOptions {
        grid: FrequencyGrid::new(cfg.grid)?,
        ..MetricOptions::default()
    };
    let frames = analysis_a
        .par_iter()
        .zip(analysis_b.par_iter())
        .map(|(fa, fb)| {
            Ok(MorphFrame {
                factor: morph_frame(&fa.model, &fb.model, cfg.tau, &opts)?,
                pitch: frame_pitch(fa.pitch, fb.pitch, cfg),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tfs: Vec<_> = frames.iter().map(|f| f.factor.scalar().cloned().unwrap()).collect();
    let pitches: Vec<_> = frames.iter().map(|f| f.pitch).collect();
    let excited = synthesize(&tfs, &pitches, a.sample_rate, cfg)?;
    let mut signal = deemphasis(&excited, cfg.preemphasis);
    if let Some(target) = cfg.rms {
        let rms = signal.rms();
        if rms > 0.0 {
            signal.samples.iter_mut().for_each(|x| *x *= target / rms);
        }
    }
    Ok(MorphResult {
        signal,
        frames,
        analysis_a,
        analysis_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::thompson_distance;

    fn ar1(c: f64) -> ArModel {
        ArModel::new(vec![1.0, c], 1.0).unwrap()
    }

    #[test]
    fn endpoints_and_identity() {
        let opts = MetricOptions::default();
        let g = FrequencyGrid::new(512).unwrap();
        let (a, b) = (ar1(-0.5), ar1(0.3));
        let f0 = morph_frame(&a, &b, 0.0, &opts).unwrap().sample(&g).unwrap();
        let want = ar_spectrum(&a).sample(&g).unwrap();
        assert!(f0.max_relative_error(&want).unwrap() < 1e-8);
        for tau in [0.2, 0.9, 1.5] {
            let f = morph_frame(&a, &a, tau, &opts).unwrap().sample(&g).unwrap();
            assert!(f.max_relative_error(&want).unwrap() < 1e-8);
        }
    }

    #[test]
    fn ar1_midpoint() {
        let opts = MetricOptions::default();
        let (a, b) = (ar1(-0.5), ar1(0.3));
        let mid = morph_frame(&a, &b, 0.5, &opts).unwrap();
        let tf = mid.scalar().unwrap();
        assert!(tf.num.len() <= 3 && tf.den.len() == 3);
        let (sa, sb) = (Spectrum::Scalar(ar_spectrum(&a)), Spectrum::Scalar(ar_spectrum(&b)));
        let m = mid.to_spectrum();
        let grid = MetricOptions::grid(8192).unwrap();
        let whole = thompson_distance(&sa, &sb, &grid).unwrap().value;
        for end in [&sa, &sb] {
            let d = thompson_distance(end, &m, &grid).unwrap().value;
            assert!((d - 0.5 * whole).abs() < 1e-4, "{d} vs {}", 0.5 * whole);
        }
    }

    #[test]
    fn mixed_voicing() {
        let cfg = MorphConfig {
            tau: 0.3,
            ..MorphConfig::default()
        };
        assert_eq!(frame_pitch(Some(120.0), None, &cfg), Some(120.0));
        assert_eq!(frame_pitch(None, Some(120.0), &cfg), None);
        assert_eq!(frame_pitch(Some(100.0), Some(200.0), &cfg), Some(130.0));
    }

    #[test]
    fn silent_prefix_is_substituted() {
        let mut x = vec![0.0; 800];
        x.extend((0..4000).map(|t| ((t as f64) * 0.07).sin() + 0.3 * ((t as f64) * 0.31).cos()));
        let s = AudioSignal::new(x, 16000).unwrap();
        let an = analyze(&s, &MorphConfig::default()).unwrap();
        assert!(an[0].substituted);
        assert_eq!(an[0].model, ArModel::flat(SILENT_GAIN));
        assert!(!an.last().unwrap().substituted);
    }

    #[test]
    fn rate_mismatch() {
        let a = AudioSignal::new(vec![0.1; 1000], 16000).unwrap();
        let b = AudioSignal::new(vec![0.1; 1000], 8000).unwrap();
        assert!(matches!(morph(&a, &b, &MorphConfig::default()), Err(Error::InvalidInput(_))));
    }
}
