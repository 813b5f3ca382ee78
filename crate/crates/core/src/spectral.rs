//! Magnitude spectrum of a time window and step-frequency selection.
//!
//! The window is mean-removed, Hann-tapered and zero-padded to a power of two
//! at least eight times its length before the transform. Peak frequencies are
//! refined by fitting a parabola through the peak bin and its neighbours.

use std::sync::Arc;

use rustfft::{num_complex::Complex, Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_SIGNAL_LEN: usize = 16;
pub const PADDING_FACTOR: usize = 8;
/// Slack on the band edges so that `k * resolution` rounding does not exclude
/// a bin sitting exactly on an edge.
const BAND_TOLERANCE_HZ: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("signal has {0} samples, need at least {MIN_SIGNAL_LEN}")]
    TooShort(usize),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("sample rate {0} Hz must exceed 9.2 Hz")]
    SampleRate(f64),
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(&'static str),
}

/// One-sided magnitude spectrum. Magnitudes are scaled so that a pure tone of
/// amplitude `A` peaks at roughly `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub freqs: Vec<f64>,
    pub mags: Vec<f64>,
    pub resolution_hz: f64,
}

impl Spectrum {
    /// Builds a spectrum with bins at `k * resolution_hz`.
    pub fn from_magnitudes(mags: Vec<f64>, resolution_hz: f64) -> Result<Self, SpectralError> {
        if !(resolution_hz.is_finite() && resolution_hz > 0.0) {
            return Err(SpectralError::InvalidSpectrum("resolution must be positive"));
        }
        if mags.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(SpectralError::InvalidSpectrum("magnitudes must be finite and non-negative"));
        }
        let freqs = (0..mags.len()).map(|k| k as f64 * resolution_hz).collect();
        Ok(Self {
            freqs,
            mags,
            resolution_hz,
        })
    }

    pub fn len(&self) -> usize {
        self.mags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mags.is_empty()
    }
}

/// Symmetric Hann taper.
pub fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let denom = (n - 1) as f64;
    (0..n)
        .map(|i| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / denom).cos()))
        .collect()
}

/// Transform length used for a signal of `n` samples.
pub fn padded_len(n: usize) -> usize {
    (n * PADDING_FACTOR).next_power_of_two()
}

/// Mean removal and Hann taper, scaled so the spectrum reads in signal units.
/// Returns the tapered samples and the amplitude normalisation factor.
pub fn prepare_window(signal: &[f64]) -> (Vec<f64>, f64) {
    let taper = hann(signal.len());
    let gain: f64 = taper.iter().sum();
    if signal.iter().all(|&v| v == signal[0]) {
        return (vec![0.0; signal.len()], 2.0 / gain);
    }
    let mean = signal.iter().sum::<f64>() / signal.len() as f64;
    let tapered = signal.iter().zip(&taper).map(|(v, w)| (v - mean) * w).collect();
    (tapered, 2.0 / gain)
}

/// Reusable transform for a fixed signal length.
pub struct SpectrumAnalyzer {
    signal_len: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl SpectrumAnalyzer {
    pub fn new(signal_len: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(padded_len(signal_len));
        Self { signal_len, fft }
    }

    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    pub fn magnitude(&self, signal: &[f64], sample_rate_hz: f64) -> Result<Spectrum, SpectralError> {
        assert_eq!(signal.len(), self.signal_len, "analyzer planned for a different length");
        validate(signal, sample_rate_hz)?;
        let n_fft = self.fft.len();
        let (tapered, scale) = prepare_window(signal);
        let mut buf: Vec<Complex<f64>> = tapered.into_iter().map(|v| Complex::new(v, 0.0)).collect();
        buf.resize(n_fft, Complex::new(0.0, 0.0));
        self.fft.process(&mut buf);
        let mags = buf[..=n_fft / 2].iter().map(|c| c.norm() * scale).collect();
        Spectrum::from_magnitudes(mags, sample_rate_hz / n_fft as f64)
    }
}

fn validate(signal: &[f64], sample_rate_hz: f64) -> Result<(), SpectralError> {
    if signal.len() < MIN_SIGNAL_LEN {
        return Err(SpectralError::TooShort(signal.len()));
    }
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 9.2) {
        return Err(SpectralError::SampleRate(sample_rate_hz));
    }
    if let Some(i) = signal.iter().position(|v| !v.is_finite()) {
        return Err(SpectralError::NonFinite(i));
    }
    Ok(())
}

/// One-sided magnitude spectrum of `signal`.
pub fn fft_magnitude(signal: &[f64], sample_rate_hz: f64) -> Result<Spectrum, SpectralError> {
    validate(signal, sample_rate_hz)?;
    SpectrumAnalyzer::new(signal.len()).magnitude(signal, sample_rate_hz)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Inclusive gait band in Hz.
    pub band_hz: (f64, f64),
    /// Frequency and magnitude ratio for preferring a lower peak.
    pub ratio: f64,
    /// Local maxima below this fraction of the strongest local maximum are ignored.
    pub noise_floor: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            band_hz: (0.3, 4.6),
            ratio: 0.6,
            noise_floor: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    NoneInBand,
    DominantPeak,
    SubharmonicPeak,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPeak {
    pub bin: usize,
    /// Interpolated frequency.
    pub freq: f64,
    /// Interpolated magnitude.
    pub mag: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepFrequencyDecision {
    pub frequency_hz: f64,
    pub rule: SelectionRule,
    pub dominant: Option<SpectralPeak>,
    pub candidate: Option<SpectralPeak>,
}

impl StepFrequencyDecision {
    fn none() -> Self {
        Self {
            frequency_hz: 0.0,
            rule: SelectionRule::NoneInBand,
            dominant: None,
            candidate: None,
        }
    }
}

/// Parabolic refinement of bin `k`.
fn refine(spec: &Spectrum, k: usize) -> SpectralPeak {
    let (a, b, c) = (spec.mags[k - 1], spec.mags[k], spec.mags[k + 1]);
    let denom = a - 2.0 * b + c;
    let offset = if denom.abs() > f64::EPSILON * b.abs() {
        (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    SpectralPeak {
        bin: k,
        freq: (k as f64 + offset) * spec.resolution_hz,
        mag: b - 0.25 * (a - c) * offset,
    }
}

/// Chooses the step frequency of a window.
///
/// Local maxima weaker than `noise_floor` times the strongest local maximum
/// anywhere in the spectrum are ignored, so leakage ripple from an
/// out-of-band component cannot pose as a gait peak. The dominant peak is the
/// largest remaining in-band maximum. A lower peak replaces it when its
/// frequency is below `ratio` times the dominant frequency and its magnitude
/// is at least `ratio` times the dominant magnitude; the largest such peak
/// wins.
pub fn select_step_frequency(spec: &Spectrum, cfg: &SelectionConfig) -> StepFrequencyDecision {
    let (lo, hi) = cfg.band_hz;
    let maxima: Vec<usize> = (1..spec.len().saturating_sub(1))
        .filter(|&k| spec.mags[k] > spec.mags[k - 1] && spec.mags[k] > spec.mags[k + 1])
        .collect();
    let strongest = maxima.iter().map(|&k| spec.mags[k]).fold(0.0, f64::max);
    if strongest <= 0.0 {
        return StepFrequencyDecision::none();
    }
    let floor = cfg.noise_floor * strongest;
    let peaks: Vec<SpectralPeak> = maxima
        .into_iter()
        .filter(|&k| spec.mags[k] >= floor)
        .filter(|&k| spec.freqs[k] >= lo - BAND_TOLERANCE_HZ && spec.freqs[k] <= hi + BAND_TOLERANCE_HZ)
        .map(|k| refine(spec, k))
        .collect();

    let by_mag = |a: &SpectralPeak, b: &SpectralPeak| a.mag.total_cmp(&b.mag).then(b.bin.cmp(&a.bin));
    let Some(dominant) = peaks.iter().copied().max_by(by_mag) else {
        return StepFrequencyDecision::none();
    };
    let candidate = peaks
        .iter()
        .copied()
        .filter(|p| p.freq < cfg.ratio * dominant.freq && p.mag >= cfg.ratio * dominant.mag)
        .max_by(by_mag);

    match candidate {
        Some(c) => StepFrequencyDecision {
            frequency_hz: c.freq,
            rule: SelectionRule::SubharmonicPeak,
            dominant: Some(dominant),
            candidate: Some(c),
        },
        None => StepFrequencyDecision {
            frequency_hz: dominant.freq,
            rule: SelectionRule::DominantPeak,
            dominant: Some(dominant),
            candidate: None,
        },
    }
}

/// Transform plus selection in one call.
pub fn step_frequency(
    signal: &[f64],
    sample_rate_hz: f64,
    cfg: &SelectionConfig,
) -> Result<StepFrequencyDecision, SpectralError> {
    Ok(select_step_frequency(&fft_magnitude(signal, sample_rate_hz)?, cfg))
}
