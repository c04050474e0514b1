//! LPC speech morphing.
//!
//! Both recordings are pre-emphasized, cut into Hamming-windowed frames and
//! fitted with all-pole models. Each pair of frame spectra is joined by the
//! Finsler geodesic, the pitch tracks are interpolated, and a pulse/noise
//! excitation is filtered through the interpolated minimum-phase factors.

mod lpc;
mod morph;
mod pitch;
mod synth;
mod wav;

pub use lpc::{
    ar_spectrum, autocorrelation, deemphasis, frame_and_window, frame_count, frames, hamming,
    levinson_durbin, preemphasis,
};
pub use morph::{analyze, morph, morph_frame, FrameAnalysis, MorphFrame, MorphResult};
pub use pitch::{estimate_pitch, interpolate_pitch};
pub use synth::{synthesize, FilterState};
pub use wav::{read_wav, write_wav};

use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioSignal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidInput("sample rate must be positive".into()));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite audio sample".into()));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        (self.samples.iter().map(|x| x * x).sum::<f64>() / self.samples.len() as f64).sqrt()
    }
}

/// All-pole model `sigma / a(z^{-1})` with `a[0] = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    pub a: Vec<f64>,
    /// Prediction-error standard deviation `sigma`.
    pub gain: f64,
}

impl ArModel {
    pub fn new(a: Vec<f64>, gain: f64) -> Result<Self> {
        if a.first() != Some(&1.0) {
            return Err(Error::InvalidInput("AR polynomial must start with 1".into()));
        }
        if !(gain > 0.0 && gain.is_finite()) || a.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("invalid AR gain {gain}")));
        }
        Ok(Self { a, gain })
    }

    /// White model `sigma`.
    pub fn flat(gain: f64) -> Self {
        Self { a: vec![1.0], gain }
    }

    pub fn order(&self) -> usize {
        self.a.len() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PitchMode {
    Linear,
    Geometric,
}

impl FromStr for PitchMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(PitchMode::Linear),
            "geometric" => Ok(PitchMode::Geometric),
            other => Err(Error::InvalidInput(format!("unknown pitch mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorphConfig {
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub order: usize,
    pub preemphasis: f64,
    pub tau: f64,
    pub pitch_mode: PitchMode,
    pub grid: usize,
    pub voicing_threshold: f64,
    pub min_pitch: f64,
    pub max_pitch: f64,
    /// Output RMS; `None` leaves the synthesized level untouched.
    pub rms: Option<f64>,
    pub seed: u64,
}

impl Default for MorphConfig {
    fn default() -> Self {
        Self {
            frame_ms: 25.0,
            hop_ms: 10.0,
            order: 14,
            preemphasis: 0.97,
            tau: 0.5,
            pitch_mode: PitchMode::Linear,
            grid: crate::rational::DEFAULT_GRID_SIZE,
            voicing_threshold: 0.3,
            min_pitch: 50.0,
            max_pitch: 400.0,
            rms: Some(0.1),
            seed: 0,
        }
    }
}

impl MorphConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if !(self.hop_ms > 0.0 && self.hop_ms <= self.frame_ms) {
            return bad(format!("need 0 < hop_ms <= frame_ms, got {} and {}", self.hop_ms, self.frame_ms));
        }
        if self.order == 0 {
            return bad("AR order must be at least 1".into());
        }
        if !self.tau.is_finite() {
            return bad(format!("tau = {}", self.tau));
        }
        if !(self.min_pitch > 0.0 && self.min_pitch < self.max_pitch) {
            return bad("need 0 < min_pitch < max_pitch".into());
        }
        if !(0.0..1.0).contains(&self.preemphasis) {
            return bad(format!("pre-emphasis {} outside [0, 1)", self.preemphasis));
        }
        if self.grid == 0 {
            return bad("grid must be nonempty".into());
        }
        Ok(())
    }

    /// Samples per frame at rate `fs`.
    pub fn frame_len(&self, fs: u32) -> usize {
        (self.frame_ms * fs as f64 / 1000.0).round() as usize
    }

    pub fn hop_len(&self, fs: u32) -> usize {
        ((self.hop_ms * fs as f64 / 1000.0).round() as usize).max(1)
    }

    /// Sets one option by name, as used in `key=value` files.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::InvalidInput(format!("bad value '{v}' for {key}")))
        }
        match key {
            "frame_ms" => self.frame_ms = num(key, value)?,
            "hop_ms" => self.hop_ms = num(key, value)?,
            "order" => self.order = num(key, value)?,
            "preemphasis" | "mu" => self.preemphasis = num(key, value)?,
            "tau" => self.tau = num(key, value)?,
            "pitch_mode" => self.pitch_mode = value.parse()?,
            "grid" => self.grid = num(key, value)?,
            "voicing_threshold" => self.voicing_threshold = num(key, value)?,
            "min_pitch" => self.min_pitch = num(key, value)?,
            "max_pitch" => self.max_pitch = num(key, value)?,
            "rms" => {
                self.rms = match value {
                    "none" | "off" => None,
                    v => Some(num(key, v)?),
                }
            }
            "seed" => self.seed = num(key, value)?,
            other => return Err(Error::InvalidInput(format!("unknown option '{other}'"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines on top of the defaults; `#` starts a comment.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("line {}: expected key=value", n + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
