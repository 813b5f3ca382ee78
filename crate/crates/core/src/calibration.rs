//! Activity threshold from a very slow calibration walk.
//!
//! One peak is picked per step on the mean-removed anteroposterior signal;
//! the threshold is the mean of those peaks plus their population standard
//! deviation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{AccelRecording, Unit};

/// Shortest calibration recording accepted for peak detection.
pub const MIN_CALIBRATION_S: f64 = 10.0;

/// Minimum number of steps a calibration walk must contain.
pub const MIN_CALIBRATION_STEPS: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum CalibrationError {
    #[error("calibration recording found {found} step peaks, need at least {MIN_CALIBRATION_STEPS}")]
    TooFewPeaks { found: usize },
    #[error("calibration recording spans {0:.2} s, need at least {MIN_CALIBRATION_S} s")]
    TooShort(f64),
    #[error("calibration recording is not uniformly sampled; resample it first")]
    NotUniform,
    #[error("non-finite peak value")]
    NonFinite,
    #[error("invalid threshold {0}")]
    InvalidThreshold(f64),
    #[error("inconsistent profile: threshold {threshold} != mu {mu} + sigma {sigma}")]
    Inconsistent { threshold: f64, mu: f64, sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakOptions {
    /// Minimum spacing between two step peaks.
    pub min_step_separation_s: f64,
    /// Minimum topographic prominence as a fraction of the peak-to-peak range.
    pub min_prominence_frac: f64,
}

impl Default for PeakOptions {
    fn default() -> Self {
        Self {
            min_step_separation_s: 0.4,
            min_prominence_frac: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPeak {
    pub t: f64,
    /// Mean-removed z value at the peak.
    pub value: f64,
}

/// Threshold separating active from inactive seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationProfile {
    pub threshold: f64,
    pub mu_peaks: f64,
    pub sigma_peaks: f64,
    /// Number of calibration steps. Zero for an explicitly supplied threshold.
    pub n_steps_m: usize,
    pub unit: Unit,
}

impl CalibrationProfile {
    /// Profile for a caller-supplied threshold with no peak statistics behind it.
    pub fn explicit(threshold: f64, unit: Unit) -> Result<Self, CalibrationError> {
        if !threshold.is_finite() || threshold < 0.0 {
            return Err(CalibrationError::InvalidThreshold(threshold));
        }
        Ok(Self {
            threshold,
            mu_peaks: threshold,
            sigma_peaks: 0.0,
            n_steps_m: 0,
            unit,
        })
    }

    pub fn is_explicit(&self) -> bool {
        self.n_steps_m == 0
    }

    /// Checks a profile loaded from disk. Serialized files carry six
    /// significant digits, so `threshold = mu + sigma` is checked to 1e-5
    /// relative.
    pub fn validate(&self) -> Result<(), CalibrationError> {
        let Self {
            threshold,
            mu_peaks: mu,
            sigma_peaks: sigma,
            n_steps_m,
            ..
        } = *self;
        if ![threshold, mu, sigma].iter().all(|v| v.is_finite()) {
            return Err(CalibrationError::NonFinite);
        }
        if sigma < 0.0 || (n_steps_m != 0 && n_steps_m < MIN_CALIBRATION_STEPS) {
            return Err(CalibrationError::Inconsistent { threshold, mu, sigma });
        }
        let scale = threshold.abs().max(mu.abs()).max(1e-12);
        if (threshold - (mu + sigma)).abs() > 1e-5 * scale {
            return Err(CalibrationError::Inconsistent { threshold, mu, sigma });
        }
        Ok(())
    }
}

/// Finds one peak per step in a calibration recording.
///
/// Candidates are strict local maxima of the mean-removed z signal (plateaus
/// count once, at their left edge). A candidate survives if its prominence is
/// at least `min_prominence_frac` of the signal's peak-to-peak range, and if no
/// taller surviving peak lies within `min_step_separation_s`.
pub fn detect_step_peaks(rec: &AccelRecording, opts: &PeakOptions) -> Result<Vec<StepPeak>, CalibrationError> {
    if !rec.is_uniform() {
        return Err(CalibrationError::NotUniform);
    }
    let duration = rec.len() as f64 / rec.sample_rate_hz();
    if duration + 1e-9 < MIN_CALIBRATION_S {
        return Err(CalibrationError::TooShort(duration));
    }
    let mut z = rec.z();
    let mean = z.iter().sum::<f64>() / z.len() as f64;
    z.iter_mut().for_each(|v| *v -= mean);

    let (lo, hi) = z
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let min_prominence = opts.min_prominence_frac * (hi - lo);

    let mut candidates: Vec<usize> = local_maxima(&z)
        .into_iter()
        .filter(|&i| {
            let p = prominence(&z, i);
            p > 0.0 && p >= min_prominence
        })
        .collect();

    let min_gap = (opts.min_step_separation_s * rec.sample_rate_hz()).ceil() as usize;
    // tallest first; ties broken by position for determinism
    candidates.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for i in candidates {
        if kept.iter().all(|&k| k.abs_diff(i) >= min_gap) {
            kept.push(i);
        }
    }
    kept.sort_unstable();

    if kept.len() < MIN_CALIBRATION_STEPS {
        return Err(CalibrationError::TooFewPeaks { found: kept.len() });
    }
    let samples = rec.samples();
    Ok(kept
        .into_iter()
        .map(|i| StepPeak {
            t: samples[i].t,
            value: z[i],
        })
        .collect())
}

fn local_maxima(z: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < z.len() {
        if z[i] > z[i - 1] {
            let mut j = i;
            while j + 1 < z.len() && z[j + 1] == z[i] {
                j += 1;
            }
            if j + 1 < z.len() && z[j + 1] < z[i] {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Height of a peak above the higher of the two minima that separate it from
/// taller terrain (or from the signal edge).
fn prominence(z: &[f64], peak: usize) -> f64 {
    let h = z[peak];
    let mut left_min = h;
    for &v in z[..peak].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &z[peak + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Mean plus population standard deviation of the step peaks.
pub fn compute_threshold(peaks: &[f64], unit: Unit) -> Result<CalibrationProfile, CalibrationError> {
    if peaks.len() < MIN_CALIBRATION_STEPS {
        return Err(CalibrationError::TooFewPeaks { found: peaks.len() });
    }
    if peaks.iter().any(|p| !p.is_finite()) {
        return Err(CalibrationError::NonFinite);
    }
    let m = peaks.len() as f64;
    let mu = peaks.iter().sum::<f64>() / m;
    let var = peaks.iter().map(|p| (p - mu).powi(2)).sum::<f64>() / m;
    let sigma = var.sqrt();
    Ok(CalibrationProfile {
        threshold: mu + sigma,
        mu_peaks: mu,
        sigma_peaks: sigma,
        n_steps_m: peaks.len(),
        unit,
    })
}

/// Peak detection followed by [`compute_threshold`].
pub fn calibrate(rec: &AccelRecording, opts: &PeakOptions) -> Result<CalibrationProfile, CalibrationError> {
    let peaks = detect_step_peaks(rec, opts)?;
    let values: Vec<f64> = peaks.iter().map(|p| p.value).collect();
    compute_threshold(&values, rec.unit())
}
