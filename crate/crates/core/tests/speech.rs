mod common;

use common::*;
use conal::speech::{self, AudioSignal, MorphConfig, PitchMode};
use conal::TransferFunction;
use num_complex::Complex64;
use rustfft::FftPlanner;

#[test]
fn periodogram_follows_factor_at_harmonics() {
    let fs = 16000;
    let cfg = MorphConfig {
        rms: None,
        ..MorphConfig::default()
    };
    let tf = TransferFunction::new(vec![1.0, 0.3], vec![1.0, -1.2, 0.72]).unwrap();
    let frames = 110;
    let out = speech::synthesize(&vec![tf.clone(); frames], &vec![Some(160.0); frames], fs, &cfg).unwrap();
    // 16000 samples of steady state: exactly 160 pitch periods
    let tail = &out.samples[out.len() - 16000..];
    let mut buf: Vec<Complex64> = tail.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    let mut ratios = Vec::new();
    for k in 1..40 {
        let bin = k * 160;
        let omega = 2.0 * std::f64::consts::PI * bin as f64 / 16000.0;
        ratios.push(buf[bin].norm_sqr() / tf.power(omega));
    }
    let r0 = ratios[0];
    for (k, r) in ratios.iter().enumerate() {
        let db = 10.0 * (r / r0).log10();
        assert!(db.abs() < 3.0, "harmonic {}: {db:.2} dB", k + 1);
    }
    // off-harmonic bins carry no energy in steady state
    assert!(buf[80].norm_sqr() < 1e-12 * buf[160].norm_sqr());
}

fn vowels() -> (AudioSignal, AudioSignal) {
    let mut r = rng(21);
    let fs = 16000;
    let a = synthetic_vowel(&mut r, &formants(fs, &[(650.0, 0.94), (1100.0, 0.9)]), 110.0, fs, 0.3);
    let b = synthetic_vowel(&mut r, &formants(fs, &[(350.0, 0.95), (2000.0, 0.9)]), 190.0, fs, 0.25);
    (AudioSignal::new(a, fs).unwrap(), AudioSignal::new(b, fs).unwrap())
}

#[test]
fn morph_is_deterministic_and_truncates() {
    let (a, b) = vowels();
    let cfg = MorphConfig {
        tau: 0.4,
        pitch_mode: PitchMode::Geometric,
        seed: 3,
        ..MorphConfig::default()
    };
    let x = speech::morph(&a, &b, &cfg).unwrap();
    let y = speech::morph(&a, &b, &cfg).unwrap();
    assert_eq!(x.signal, y.signal);
    let frames_b = speech::frame_count(b.len(), &cfg, 16000).unwrap();
    assert_eq!(x.frames.len(), frames_b);
    assert_eq!(x.signal.len(), frames_b * cfg.hop_len(16000));
    assert!((x.signal.rms() - 0.1).abs() < 1e-12);
}

#[test]
fn analysis_finds_vowel_pitch() {
    let (a, b) = vowels();
    let cfg = MorphConfig::default();
    for (sig, hz) in [(&a, 110.0), (&b, 190.0)] {
        let an = speech::analyze(sig, &cfg).unwrap();
        let voiced: Vec<f64> = an.iter().filter_map(|f| f.pitch).collect();
        assert!(voiced.len() * 3 >= an.len() * 2, "{} of {} voiced", voiced.len(), an.len());
        let median = {
            let mut v = voiced.clone();
            v.sort_by(f64::total_cmp);
            v[v.len() / 2]
        };
        // synthetic period is round(fs / hz) samples
        let want = 16000.0 / (16000.0f64 / hz).round();
        assert!((median - want).abs() <= 0.02 * want, "{median} vs {want}");
    }
}

#[test]
fn extrapolated_frames_stay_positive() {
    let (a, b) = vowels();
    let cfg = MorphConfig::default();
    let (fa, fb) = (speech::analyze(&a, &cfg).unwrap(), speech::analyze(&b, &cfg).unwrap());
    let opts = conal::MetricOptions::default();
    let grid = conal::FrequencyGrid::new(1024).unwrap();
    for i in (0..fa.len().min(fb.len())).step_by(5) {
        for tau in [-1.0, -0.5, 1.5, 2.0] {
            let f = speech::morph_frame(&fa[i].model, &fb[i].model, tau, &opts).unwrap();
            let s = f.sample(&grid).unwrap();
            assert!(s.min_eigenvalue() > 0.0, "frame {i}, tau {tau}");
        }
    }
}

#[test]
fn wav_round_trip_through_morph() {
    let (a, b) = vowels();
    let dir = tempfile::tempdir().unwrap();
    let (pa, pb, po) = (dir.path().join("a.wav"), dir.path().join("b.wav"), dir.path().join("o.wav"));
    speech::write_wav(&pa, &a).unwrap();
    speech::write_wav(&pb, &b).unwrap();
    let ra = speech::read_wav(&pa).unwrap();
    let rb = speech::read_wav(&pb).unwrap();
    let m = speech::morph(&ra, &rb, &MorphConfig::default()).unwrap();
    speech::write_wav(&po, &m.signal).unwrap();
    let back = speech::read_wav(&po).unwrap();
    assert_eq!(back.len(), m.signal.len());
}
