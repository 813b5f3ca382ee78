//! Windowed gait analysis of a uniform recording.
//!
//! The anteroposterior signal is cut into consecutive windows. Each window
//! gets an active-second count from the calibration threshold and a step
//! frequency from its spectrum. Steps, step length, distance and velocity
//! follow from those, and [`summarize`] aggregates the windows.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agreement::quantile;
use crate::calibration::CalibrationProfile;
use crate::ingest::{AccelRecording, SubjectProfile, Unit};
use crate::spectral::{SelectionConfig, SelectionRule, SpectralError, Spectrum, SpectrumAnalyzer, StepFrequencyDecision};
use crate::step_length::{StepLengthError, StepLengthModel};

/// Windows (and the whole recording) shorter than this are not analysed.
pub const MIN_WINDOW_S: f64 = 2.0;

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("recording lasts {0:.3} s, need at least {MIN_WINDOW_S} s")]
    TooShort(f64),
    #[error("recording is not uniformly sampled; resample it first")]
    NotUniform,
    #[error("window length must be positive, got {0}")]
    InvalidWindow(f64),
    #[error("unit mismatch: recording in {recording}, calibration in {calibration}")]
    UnitMismatch { recording: Unit, calibration: Unit },
    #[error("cannot summarize an empty list of windows")]
    NoWindows,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    StepLength(#[from] StepLengthError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    pub window_s: f64,
    pub selection: SelectionConfig,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            window_s: 5.0,
            selection: SelectionConfig::default(),
        }
    }
}

/// A slice of the anteroposterior signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow<'a> {
    pub index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: &'a [f64],
    pub sample_rate_hz: f64,
    pub unit: Unit,
}

impl TimeWindow<'_> {
    pub fn duration_s(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn id(&self) -> WindowId {
        WindowId {
            index: self.index,
            t_start: self.t_start,
            t_end: self.t_end,
            duration_s: self.duration_s(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowId {
    pub index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub duration_s: f64,
}

/// Recording duration counted as one sample period per sample.
pub fn recording_duration_s(rec: &AccelRecording) -> f64 {
    rec.len() as f64 / rec.sample_rate_hz()
}

/// Owned z signal that windows borrow from.
pub struct WindowedSignal {
    z: Vec<f64>,
    sample_rate_hz: f64,
    unit: Unit,
    window_len: usize,
}

impl WindowedSignal {
    pub fn new(rec: &AccelRecording, window_s: f64) -> Result<Self, PipelineError> {
        if !(window_s.is_finite() && window_s > 0.0) {
            return Err(PipelineError::InvalidWindow(window_s));
        }
        if !rec.is_uniform() {
            return Err(PipelineError::NotUniform);
        }
        let duration = recording_duration_s(rec);
        if duration + 1e-9 < MIN_WINDOW_S {
            return Err(PipelineError::TooShort(duration));
        }
        let window_len = ((window_s * rec.sample_rate_hz()).round() as usize).max(1);
        Ok(Self {
            z: rec.z(),
            sample_rate_hz: rec.sample_rate_hz(),
            unit: rec.unit(),
            window_len,
        })
    }

    /// Consecutive non-overlapping windows. A trailing partial window is kept
    /// when it lasts at least [`MIN_WINDOW_S`].
    pub fn windows(&self) -> Vec<TimeWindow<'_>> {
        let rate = self.sample_rate_hz;
        let min_tail = (MIN_WINDOW_S * rate - 1e-9).ceil() as usize;
        self.z
            .chunks(self.window_len)
            .enumerate()
            .filter(|(_, c)| c.len() == self.window_len || c.len() >= min_tail)
            .map(|(index, samples)| {
                let start = index * self.window_len;
                TimeWindow {
                    index,
                    t_start: start as f64 / rate,
                    t_end: (start + samples.len()) as f64 / rate,
                    samples,
                    sample_rate_hz: rate,
                    unit: self.unit,
                }
            })
            .collect()
    }
}

/// Window identities for a recording; see [`WindowedSignal::windows`].
pub fn split_windows(rec: &AccelRecording, window_s: f64) -> Result<Vec<WindowId>, PipelineError> {
    Ok(WindowedSignal::new(rec, window_s)?.windows().iter().map(TimeWindow::id).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActiveSeconds {
    pub active_s: u32,
    pub mask: Vec<bool>,
}

/// Splits the window into 1 s intervals (a trailing fragment of at least half
/// a second counts as an interval) and marks an interval active when the peak
/// of the mean-removed `|z|` reaches the threshold.
pub fn classify_active_seconds(window: &TimeWindow<'_>, cal: &CalibrationProfile) -> Result<ActiveSeconds, PipelineError> {
    if window.unit != cal.unit {
        return Err(PipelineError::UnitMismatch {
            recording: window.unit,
            calibration: cal.unit,
        });
    }
    let per_second = (window.sample_rate_hz.round() as usize).max(1);
    let s = window.samples;
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    let mask: Vec<bool> = s
        .chunks(per_second)
        .filter(|c| c.len() == per_second || 2 * c.len() >= per_second)
        .map(|c| c.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max) >= cal.threshold)
        .collect();
    Ok(ActiveSeconds {
        active_s: mask.iter().filter(|&&a| a).count() as u32,
        mask,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowMetrics {
    pub window: WindowId,
    pub active_s: u32,
    pub active_mask: Vec<bool>,
    pub step_frequency_hz: f64,
    pub rule: SelectionRule,
    pub steps: f64,
    pub step_length_m: f64,
    pub distance_m: f64,
    pub velocity_mps: f64,
    pub sf_clamped: bool,
    pub sl_floored: bool,
}

/// Window metrics together with the spectrum they were derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowDiagnostics {
    pub index: usize,
    pub decision: StepFrequencyDecision,
    pub spectrum: Spectrum,
}

fn analyze_with(
    analyzer: &SpectrumAnalyzer,
    window: &TimeWindow<'_>,
    cal: &CalibrationProfile,
    subject: &SubjectProfile,
    cfg: &AnalysisConfig,
) -> Result<(WindowMetrics, WindowDiagnostics), PipelineError> {
    let active = classify_active_seconds(window, cal)?;
    let spectrum = analyzer.magnitude(window.samples, window.sample_rate_hz)?;
    let decision = crate::spectral::select_step_frequency(&spectrum, &cfg.selection);

    let mut m = WindowMetrics {
        window: window.id(),
        active_s: active.active_s,
        active_mask: active.mask,
        step_frequency_hz: 0.0,
        rule: decision.rule,
        steps: 0.0,
        step_length_m: 0.0,
        distance_m: 0.0,
        velocity_mps: 0.0,
        sf_clamped: false,
        sl_floored: false,
    };
    // An inactive window reports no motion whatever its spectrum shows.
    if m.active_s > 0 && decision.frequency_hz > 0.0 {
        let sl = StepLengthModel::PUBLISHED.predict(decision.frequency_hz, subject)?;
        m.step_frequency_hz = decision.frequency_hz;
        m.steps = decision.frequency_hz * f64::from(m.active_s);
        m.step_length_m = sl.step_length_m;
        m.distance_m = m.steps * sl.step_length_m;
        m.velocity_mps = m.distance_m / f64::from(m.active_s);
        m.sf_clamped = sl.clamped;
        m.sl_floored = sl.floored;
    }
    let diag = WindowDiagnostics {
        index: window.index,
        decision,
        spectrum,
    };
    Ok((m, diag))
}

/// Metrics for one window.
pub fn analyze_window(
    window: &TimeWindow<'_>,
    cal: &CalibrationProfile,
    subject: &SubjectProfile,
    cfg: &AnalysisConfig,
) -> Result<WindowMetrics, PipelineError> {
    let analyzer = SpectrumAnalyzer::new(window.samples.len());
    Ok(analyze_with(&analyzer, window, cal, subject, cfg)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitSummary {
    pub total_duration_s: f64,
    pub active_duration_s: f64,
    pub total_steps: f64,
    /// `total_steps` rounded half-up.
    pub total_steps_rounded: u64,
    pub avg_step_frequency_hz: f64,
    pub avg_step_length_m: f64,
    pub avg_step_velocity_mps: f64,
    pub total_distance_m: f64,
    /// 95th percentile of the velocities of active windows (0 if none).
    pub p95_step_velocity_mps: f64,
    pub n_windows: usize,
}

/// Aggregates window metrics. Averages of frequency and velocity divide by
/// the total duration, rest included.
pub fn summarize(metrics: &[WindowMetrics]) -> Result<GaitSummary, PipelineError> {
    if metrics.is_empty() {
        return Err(PipelineError::NoWindows);
    }
    let total_duration_s: f64 = metrics.iter().map(|m| m.window.duration_s).sum();
    let active_duration_s: f64 = metrics.iter().map(|m| f64::from(m.active_s)).sum();
    let total_steps: f64 = metrics.iter().map(|m| m.steps).sum();
    let total_distance_m: f64 = metrics.iter().map(|m| m.distance_m).sum();
    let active_velocities: Vec<f64> = metrics.iter().filter(|m| m.active_s > 0).map(|m| m.velocity_mps).collect();
    Ok(GaitSummary {
        total_duration_s,
        active_duration_s,
        total_steps,
        total_steps_rounded: (total_steps + 0.5).floor() as u64,
        avg_step_frequency_hz: total_steps / total_duration_s,
        avg_step_length_m: if total_steps > 0.0 { total_distance_m / total_steps } else { 0.0 },
        avg_step_velocity_mps: total_distance_m / total_duration_s,
        total_distance_m,
        p95_step_velocity_mps: if active_velocities.is_empty() {
            0.0
        } else {
            quantile(&active_velocities, 0.95)
        },
        n_windows: metrics.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitAnalysis {
    pub windows: Vec<WindowMetrics>,
    pub summary: GaitSummary,
    /// Windows whose step frequency was clamped into the model band.
    pub sf_clamped_windows: usize,
    /// Windows whose step length regression was floored at zero.
    pub sl_floored_windows: usize,
    pub dropped_tail_s: f64,
}

/// Full pipeline with per-window spectra kept for diagnostics.
pub fn analyze_recording_detailed(
    rec: &AccelRecording,
    cal: &CalibrationProfile,
    subject: &SubjectProfile,
    cfg: &AnalysisConfig,
) -> Result<(GaitAnalysis, Vec<WindowDiagnostics>), PipelineError> {
    if rec.unit() != cal.unit {
        return Err(PipelineError::UnitMismatch {
            recording: rec.unit(),
            calibration: cal.unit,
        });
    }
    let signal = WindowedSignal::new(rec, cfg.window_s)?;
    let windows = signal.windows();
    let mut analyzers: Vec<SpectrumAnalyzer> = Vec::new();
    let mut metrics = Vec::with_capacity(windows.len());
    let mut diags = Vec::with_capacity(windows.len());
    for w in &windows {
        let len = w.samples.len();
        let pos = match analyzers.iter().position(|a| a.signal_len() == len) {
            Some(p) => p,
            None => {
                analyzers.push(SpectrumAnalyzer::new(len));
                analyzers.len() - 1
            }
        };
        let (m, d) = analyze_with(&analyzers[pos], w, cal, subject, cfg)?;
        metrics.push(m);
        diags.push(d);
    }
    let summary = summarize(&metrics)?;
    let analysis = GaitAnalysis {
        sf_clamped_windows: metrics.iter().filter(|m| m.sf_clamped).count(),
        sl_floored_windows: metrics.iter().filter(|m| m.sl_floored).count(),
        dropped_tail_s: recording_duration_s(rec) - summary.total_duration_s,
        windows: metrics,
        summary,
    };
    Ok((analysis, diags))
}

pub fn analyze_recording(
    rec: &AccelRecording,
    cal: &CalibrationProfile,
    subject: &SubjectProfile,
    cfg: &AnalysisConfig,
) -> Result<GaitAnalysis, PipelineError> {
    Ok(analyze_recording_detailed(rec, cal, subject, cfg)?.0)
}
