//! CSV ingestion of triaxial accelerometer recordings and resampling onto a
//! uniform time grid.
//!
//! The z column is treated as the anteroposterior axis by default. Which CSV
//! column feeds each axis is configured through [`IngestOptions`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Lowest sampling rate accepted for analysis. The gait band tops out at
/// 4.6 Hz, so anything slower leaves no margin under Nyquist.
pub const MIN_SAMPLE_RATE_HZ: f64 = 10.0;

/// Longest tolerated gap between consecutive samples.
pub const MAX_GAP_S: f64 = 1.0;

/// Tolerance on Δt used to decide whether a recording is uniform.
pub const UNIFORM_TOLERANCE_S: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("non-monotone timestamps at line {line}: t = {t} does not exceed previous t = {prev}")]
    NonMonotone { line: u64, t: f64, prev: f64 },
    #[error("recording needs at least 2 samples, found {0}")]
    TooFewSamples(usize),
    #[error("sampling too sparse: {rate_hz:.3} Hz is below the {min_hz} Hz minimum")]
    TooSparse { rate_hz: f64, min_hz: f64 },
    #[error("dropout of {gap_s:.3} s at t = {at_s:.3} s exceeds the {max_s} s limit")]
    Dropout { at_s: f64, gap_s: f64, max_s: f64 },
    #[error("invalid target sampling rate {0}")]
    InvalidRate(f64),
    #[error("standing height {0} m outside the accepted range [0.5, 2.5]")]
    InvalidHeight(f64),
    #[error("csv: {0}")]
    Csv(String),
}

/// Acceleration unit carried by a recording. Calibration and analysis must
/// agree on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Unit {
    #[default]
    #[serde(rename = "g")]
    G,
    #[serde(rename = "ms2")]
    MetersPerSecondSquared,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unit::G => f.write_str("g"),
            Unit::MetersPerSecondSquared => f.write_str("ms2"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    #[default]
    #[serde(rename = "s")]
    Seconds,
    #[serde(rename = "ms")]
    Milliseconds,
}

/// Column mapping and units for [`parse_recording`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestOptions {
    pub time_column: String,
    pub x_column: String,
    pub y_column: String,
    /// Column holding the anteroposterior axis.
    pub z_column: String,
    pub time_unit: TimeUnit,
    pub unit: Unit,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            time_column: "t".into(),
            x_column: "x".into(),
            y_column: "y".into(),
            z_column: "z".into(),
            time_unit: TimeUnit::Seconds,
            unit: Unit::G,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccelSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// A validated triaxial recording. Timestamps start at zero and are strictly
/// increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct AccelRecording {
    samples: Vec<AccelSample>,
    sample_rate_hz: f64,
    unit: Unit,
    axis_convention: String,
}

impl AccelRecording {
    /// Validates and wraps a sample sequence. `sample_rate_hz` is the nominal
    /// rate; use [`AccelRecording::is_uniform`] to check whether the grid
    /// actually matches it.
    pub fn new(
        samples: Vec<AccelSample>,
        sample_rate_hz: f64,
        unit: Unit,
        axis_convention: impl Into<String>,
    ) -> Result<Self, IngestError> {
        if samples.len() < 2 {
            return Err(IngestError::TooFewSamples(samples.len()));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(IngestError::InvalidRate(sample_rate_hz));
        }
        for (i, s) in samples.iter().enumerate() {
            if ![s.t, s.x, s.y, s.z].iter().all(|v| v.is_finite()) {
                return Err(IngestError::MalformedRow {
                    line: i as u64 + 1,
                    reason: "non-finite value".into(),
                });
            }
            if i > 0 && s.t <= samples[i - 1].t {
                return Err(IngestError::NonMonotone {
                    line: i as u64 + 1,
                    t: s.t,
                    prev: samples[i - 1].t,
                });
            }
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            unit,
            axis_convention: axis_convention.into(),
        })
    }

    /// Builds a uniform recording from per-axis signals sampled at `t = i / rate`.
    pub fn from_uniform_axes(
        x: &[f64],
        y: &[f64],
        z: &[f64],
        sample_rate_hz: f64,
        unit: Unit,
    ) -> Result<Self, IngestError> {
        assert!(x.len() == z.len() && y.len() == z.len(), "axis lengths differ");
        let samples = z
            .iter()
            .zip(x.iter().zip(y))
            .enumerate()
            .map(|(i, (&z, (&x, &y)))| AccelSample {
                t: i as f64 / sample_rate_hz,
                x,
                y,
                z,
            })
            .collect();
        Self::new(samples, sample_rate_hz, unit, "z")
    }

    /// Uniform recording with only the anteroposterior axis populated.
    pub fn from_uniform_z(z: &[f64], sample_rate_hz: f64, unit: Unit) -> Result<Self, IngestError> {
        let zeros = vec![0.0; z.len()];
        Self::from_uniform_axes(&zeros, &zeros, z, sample_rate_hz, unit)
    }

    pub fn samples(&self) -> &[AccelSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn axis_convention(&self) -> &str {
        &self.axis_convention
    }

    /// Time of the last sample (the first is always 0).
    pub fn span_s(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// Anteroposterior signal.
    pub fn z(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.z).collect()
    }

    /// True when every Δt matches `1 / sample_rate_hz` to within 1e-9 s.
    pub fn is_uniform(&self) -> bool {
        let dt = 1.0 / self.sample_rate_hz;
        self.samples
            .windows(2)
            .all(|w| ((w[1].t - w[0].t) - dt).abs() < UNIFORM_TOLERANCE_S)
    }

    /// Median spacing between consecutive timestamps.
    pub fn median_dt(&self) -> f64 {
        let mut dts: Vec<f64> = self.samples.windows(2).map(|w| w[1].t - w[0].t).collect();
        dts.sort_by(f64::total_cmp);
        let n = dts.len();
        if n % 2 == 1 {
            dts[n / 2]
        } else {
            0.5 * (dts[n / 2 - 1] + dts[n / 2])
        }
    }
}

/// Standing height and diagnosis indicator used by the step-length model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubjectProfile {
    height_m: f64,
    dmd: bool,
}

impl SubjectProfile {
    pub fn new(height_m: f64, dmd: bool) -> Result<Self, IngestError> {
        if !(0.5..=2.5).contains(&height_m) {
            return Err(IngestError::InvalidHeight(height_m));
        }
        Ok(Self { height_m, dmd })
    }

    pub fn height_m(&self) -> f64 {
        self.height_m
    }

    pub fn dmd(&self) -> bool {
        self.dmd
    }
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize, IngestError> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
}

/// Parses a CSV recording. Timestamps are shifted so that the first sample is
/// at `t = 0`; the result is not resampled.
pub fn parse_recording(csv_text: &str, opts: &IngestOptions) -> Result<AccelRecording, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(csv_text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Csv(e.to_string()))?
        .clone();
    let cols = [
        column_index(&headers, &opts.time_column)?,
        column_index(&headers, &opts.x_column)?,
        column_index(&headers, &opts.y_column)?,
        column_index(&headers, &opts.z_column)?,
    ];
    let time_scale = match opts.time_unit {
        TimeUnit::Seconds => 1.0,
        TimeUnit::Milliseconds => 1e-3,
    };

    let mut raw: Vec<[f64; 4]> = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let line = reader.position().line() + 1;
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                return Err(IngestError::MalformedRow {
                    line: e.position().map_or(line, |p| p.line()),
                    reason: e.to_string(),
                })
            }
        }
        let line = record.position().map_or(line, |p| p.line());
        let mut vals = [0.0; 4];
        for (slot, &c) in vals.iter_mut().zip(&cols) {
            let field = record.get(c).ok_or_else(|| IngestError::MalformedRow {
                line,
                reason: format!("missing field {}", c + 1),
            })?;
            let v: f64 = field.parse().map_err(|_| IngestError::MalformedRow {
                line,
                reason: format!("cannot parse `{field}` as a number"),
            })?;
            if !v.is_finite() {
                return Err(IngestError::MalformedRow {
                    line,
                    reason: format!("non-finite value `{field}`"),
                });
            }
            *slot = v;
        }
        if let Some(prev) = raw.last() {
            if vals[0] <= prev[0] {
                return Err(IngestError::NonMonotone {
                    line,
                    t: vals[0] * time_scale,
                    prev: prev[0] * time_scale,
                });
            }
        }
        raw.push(vals);
    }
    if raw.len() < 2 {
        return Err(IngestError::TooFewSamples(raw.len()));
    }

    let t0 = raw[0][0];
    let samples: Vec<AccelSample> = raw
        .iter()
        .map(|&[t, x, y, z]| AccelSample {
            t: (t - t0) * time_scale,
            x,
            y,
            z,
        })
        .collect();
    let mut rec = AccelRecording::new(samples, 1.0, opts.unit, opts.z_column.clone())?;
    rec.sample_rate_hz = 1.0 / rec.median_dt();
    Ok(rec)
}

/// Target rate for [`resample_uniform`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetRate {
    /// `round(1 / median Δt)`.
    Auto,
    Hz(f64),
}

/// Linearly interpolates every axis onto the grid `t = i / rate` covering
/// `[0, t_last]`.
pub fn resample_uniform(rec: &AccelRecording, target: TargetRate) -> Result<AccelRecording, IngestError> {
    let observed_hz = 1.0 / rec.median_dt();
    if observed_hz < MIN_SAMPLE_RATE_HZ - 1e-6 {
        return Err(IngestError::TooSparse {
            rate_hz: observed_hz,
            min_hz: MIN_SAMPLE_RATE_HZ,
        });
    }
    let rate = match target {
        TargetRate::Auto => observed_hz.round(),
        TargetRate::Hz(hz) => hz,
    };
    if !rate.is_finite() || rate <= 0.0 {
        return Err(IngestError::InvalidRate(rate));
    }
    if rate < MIN_SAMPLE_RATE_HZ - 1e-6 {
        return Err(IngestError::TooSparse {
            rate_hz: rate,
            min_hz: MIN_SAMPLE_RATE_HZ,
        });
    }
    if let Some(w) = rec.samples.windows(2).find(|w| w[1].t - w[0].t > MAX_GAP_S) {
        return Err(IngestError::Dropout {
            at_s: w[0].t,
            gap_s: w[1].t - w[0].t,
            max_s: MAX_GAP_S,
        });
    }

    let src = &rec.samples;
    let t_last = rec.span_s();
    let n = (t_last * rate + 1e-9).floor() as usize + 1;
    let mut out = Vec::with_capacity(n);
    let mut k = 0usize;
    for i in 0..n {
        let t = i as f64 / rate;
        while k + 2 < src.len() && src[k + 1].t <= t {
            k += 1;
        }
        let (a, b) = (&src[k], &src[k + 1]);
        let sample = if (t - a.t).abs() < UNIFORM_TOLERANCE_S {
            AccelSample { t, ..*a }
        } else if (t - b.t).abs() < UNIFORM_TOLERANCE_S {
            AccelSample { t, ..*b }
        } else {
            let frac = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
            let lerp = |u: f64, v: f64| u + (v - u) * frac;
            AccelSample {
                t,
                x: lerp(a.x, b.x),
                y: lerp(a.y, b.y),
                z: lerp(a.z, b.z),
            }
        };
        out.push(sample);
    }
    AccelRecording::new(out, rate, rec.unit, rec.axis_convention.clone())
}
