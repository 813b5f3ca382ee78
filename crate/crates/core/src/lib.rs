//! Step frequency, step length, distance and velocity from a single
//! anteroposterior accelerometer axis.
//!
//! The processing chain is:
//!
//! 1. [`ingest`]: parse a CSV recording and resample it onto a uniform grid.
//! 2. [`calibration`]: derive an activity threshold from a very slow walk.
//! 3. [`pipeline`]: cut the recording into 5 s windows, count active seconds,
//!    pick each window's step frequency with [`spectral`], convert it to a step
//!    length with [`step_length`], and aggregate.
//! 4. [`agreement`]: compare estimates against reference measurements.
//!
//! [`synthgen`] produces synthetic recordings with known ground truth, and
//! [`cli`] backs the `gaitfft` binary.

pub mod agreement;
pub mod calibration;
pub mod cli;
pub mod ingest;
pub mod output;
pub mod pipeline;
pub mod spectral;
pub mod step_length;
pub mod synthgen;

pub use agreement::{agreement_report, AgreementReport, PairedSeries};
pub use calibration::{calibrate, compute_threshold, detect_step_peaks, CalibrationProfile, PeakOptions};
pub use ingest::{parse_recording, resample_uniform, AccelRecording, IngestOptions, SubjectProfile, TargetRate, Unit};
pub use pipeline::{analyze_recording, summarize, AnalysisConfig, GaitAnalysis, GaitSummary, WindowMetrics};
pub use spectral::{fft_magnitude, select_step_frequency, SelectionConfig, Spectrum, StepFrequencyDecision};
pub use step_length::{StepLengthModel, StepLengthPrediction};
pub use synthgen::{generate, GaitScenario, GaitSegment, GroundTruth};
