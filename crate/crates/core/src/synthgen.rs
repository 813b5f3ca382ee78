//! Deterministic synthetic walking recordings with analytic ground truth.
//!
//! Each segment contributes `A·sin(θ) + r·A·sin(2θ)` to the anteroposterior
//! axis, where the phase `θ` advances at `2π·cadence` and is carried across
//! segment boundaries. Rest segments hold the phase and add no signal. Noise
//! is uniform in `[-noise, +noise]`, drawn from Xoshiro256++ seeded with
//! `seed_from_u64(seed)`; per sample the draws are z, then x, then y. The x
//! and y axes carry noise only, at one tenth of the z amplitude.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{AccelRecording, Unit};

pub const CADENCE_BAND_HZ: (f64, f64) = (0.3, 4.6);

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("scenario has no segments")]
    Empty,
    #[error("segment {index}: {reason}")]
    Segment { index: usize, reason: String },
    #[error("sample rate {0} Hz must be at least 10 Hz")]
    SampleRate(f64),
    #[error("noise amplitude {0} must be finite and non-negative")]
    Noise(f64),
    #[error("scenario produces fewer than 2 samples")]
    TooShort,
    #[error("scenario file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaitSegment {
    pub duration_s: f64,
    /// Steps per second; 0 marks rest.
    pub cadence_hz: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub harmonic2_ratio: f64,
}

fn one() -> f64 {
    1.0
}

fn default_rate() -> f64 {
    100.0
}

impl GaitSegment {
    pub fn walk(duration_s: f64, cadence_hz: f64, amplitude: f64) -> Self {
        Self {
            duration_s,
            cadence_hz,
            amplitude,
            harmonic2_ratio: 0.0,
        }
    }

    pub fn rest(duration_s: f64) -> Self {
        Self::walk(duration_s, 0.0, 0.0)
    }

    pub fn with_harmonic(mut self, ratio: f64) -> Self {
        self.harmonic2_ratio = ratio;
        self
    }

    pub fn is_rest(&self) -> bool {
        self.cadence_hz == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitScenario {
    pub segments: Vec<GaitSegment>,
    #[serde(default = "default_rate")]
    pub sample_rate_hz: f64,
    #[serde(default)]
    pub noise_amplitude: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub unit: Unit,
}

impl GaitScenario {
    pub fn new(segments: Vec<GaitSegment>, sample_rate_hz: f64, noise_amplitude: f64, seed: u64) -> Self {
        Self {
            segments,
            sample_rate_hz,
            noise_amplitude,
            seed,
            unit: Unit::G,
        }
    }

    /// Parses TOML or JSON, picking the format from the first non-blank
    /// character (`{` means JSON).
    pub fn from_str_any(text: &str) -> Result<Self, ScenarioError> {
        let s: Self = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.segments.is_empty() {
            return Err(ScenarioError::Empty);
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz >= 10.0) {
            return Err(ScenarioError::SampleRate(self.sample_rate_hz));
        }
        if !(self.noise_amplitude.is_finite() && self.noise_amplitude >= 0.0) {
            return Err(ScenarioError::Noise(self.noise_amplitude));
        }
        for (index, seg) in self.segments.iter().enumerate() {
            let bad = |reason: String| Err(ScenarioError::Segment { index, reason });
            if !(seg.duration_s.is_finite() && seg.duration_s > 0.0) {
                return bad(format!("duration {} must be positive", seg.duration_s));
            }
            let (lo, hi) = CADENCE_BAND_HZ;
            if !(seg.cadence_hz == 0.0 || (lo..=hi).contains(&seg.cadence_hz)) {
                return bad(format!("cadence {} Hz outside {{0}} ∪ [{lo}, {hi}]", seg.cadence_hz));
            }
            if !(seg.amplitude.is_finite() && seg.amplitude >= 0.0) {
                return bad(format!("amplitude {} must be non-negative", seg.amplitude));
            }
            if !(0.0..1.0).contains(&seg.harmonic2_ratio) {
                return bad(format!("harmonic2_ratio {} outside [0, 1)", seg.harmonic2_ratio));
            }
        }
        if self.boundaries().last().copied().unwrap_or(0) < 2 {
            return Err(ScenarioError::TooShort);
        }
        Ok(())
    }

    /// Cumulative sample index at the end of each segment.
    fn boundaries(&self) -> Vec<usize> {
        let mut acc = 0.0;
        self.segments
            .iter()
            .map(|s| {
                acc += s.duration_s;
                (acc * self.sample_rate_hz).round() as usize
            })
            .collect()
    }

    pub fn total_duration_s(&self) -> f64 {
        self.segments.iter().map(|s| s.duration_s).sum()
    }

    pub fn ground_truth(&self, window_s: f64) -> GroundTruth {
        let segment_steps: Vec<f64> = self.segments.iter().map(|s| s.cadence_hz * s.duration_s).collect();
        let active = self.segments.iter().filter(|s| !s.is_rest()).map(|s| s.duration_s).sum();
        let total = self.total_duration_s();

        // Cadence covering the largest share of each window; a trailing partial
        // window is listed only if it is long enough to be analysed.
        let full = (total / window_s + 1e-9).floor() as usize;
        let tail = total - full as f64 * window_s;
        let n_windows = full + usize::from(tail + 1e-9 >= crate::pipeline::MIN_WINDOW_S);
        let mut window_frequencies = Vec::with_capacity(n_windows);
        for w in 0..n_windows {
            let (ws, we) = (w as f64 * window_s, ((w + 1) as f64 * window_s).min(total));
            let mut start = 0.0;
            let mut best = (0.0, 0.0);
            for s in &self.segments {
                let end = start + s.duration_s;
                let overlap = (end.min(we) - start.max(ws)).max(0.0);
                if overlap > best.0 + 1e-12 {
                    best = (overlap, s.cadence_hz);
                }
                start = end;
            }
            window_frequencies.push(best.1);
        }

        GroundTruth {
            total_steps: segment_steps.iter().sum(),
            segment_steps,
            active_duration_s: active,
            total_duration_s: total,
            window_s,
            window_frequencies,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub total_steps: f64,
    pub segment_steps: Vec<f64>,
    pub active_duration_s: f64,
    pub total_duration_s: f64,
    pub window_s: f64,
    /// Dominant cadence expected in each analysis window.
    pub window_frequencies: Vec<f64>,
}

/// Renders the scenario. Identical scenarios produce bit-identical output.
pub fn generate(scenario: &GaitScenario) -> Result<(AccelRecording, GroundTruth), ScenarioError> {
    scenario.validate()?;
    let rate = scenario.sample_rate_hz;
    let bounds = scenario.boundaries();
    let n = *bounds.last().expect("validated non-empty");
    let noise = scenario.noise_amplitude;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(scenario.seed);
    let mut draw = |scale: f64| {
        let u: f64 = rng.random_range(-1.0..=1.0);
        u * scale
    };

    let (mut x, mut y, mut z) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut phase = 0.0f64;
    let mut seg = 0;
    for i in 0..n {
        while i >= bounds[seg] {
            seg += 1;
        }
        let s = &scenario.segments[seg];
        let signal = if s.is_rest() {
            0.0
        } else {
            s.amplitude * (phase.sin() + s.harmonic2_ratio * (2.0 * phase).sin())
        };
        z.push(signal + draw(noise));
        x.push(draw(0.1 * noise));
        y.push(draw(0.1 * noise));
        phase += 2.0 * std::f64::consts::PI * s.cadence_hz / rate;
    }
    let rec = AccelRecording::from_uniform_axes(&x, &y, &z, rate, scenario.unit)
        .map_err(|_| ScenarioError::TooShort)?;
    Ok((rec, scenario.ground_truth(5.0)))
}
