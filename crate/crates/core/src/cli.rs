//! Command-line front end.
//!
//! Subcommands: `calibrate`, `analyze`, `stats`, `synth`, `surface`. Data goes
//! to stdout (or to files under `--out`), diagnostics to stderr. Settings
//! resolve as command-line flag, then `--config` file, then built-in default,
//! and the effective values are echoed in each output's `metadata` block.
//!
//! Exit codes are listed in [`ExitStatus`].

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::agreement::{self, AgreementError, AgreementThresholds, PairedSeries, PercentBase};
use crate::calibration::{self, CalibrationError, CalibrationProfile, PeakOptions};
use crate::ingest::{self, IngestError, IngestOptions, SubjectProfile, TargetRate, TimeUnit, Unit};
use crate::output;
use crate::pipeline::{self, AnalysisConfig, PipelineError};
use crate::spectral::SelectionConfig;
use crate::step_length::{self, StepLengthError};
use crate::synthgen::{self, GaitScenario, ScenarioError};

pub const TOOL_NAME: &str = "gaitfft";

/// Process exit codes. Values are stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[repr(u8)]
pub enum ExitStatus {
    Ok = 0,
    /// Command-line usage error (reported by the argument parser).
    Usage = 2,
    Io = 3,
    Parse = 4,
    TooFewPeaks = 5,
    Config = 6,
    TooShort = 7,
    UnitMismatch = 8,
    LengthMismatch = 9,
    TooFewPairs = 10,
    InvalidScenario = 11,
    Analysis = 12,
    Statistics = 13,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Ingest { path: PathBuf, source: IngestError },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error("calibration: {0}")]
    Calibration(#[from] CalibrationError),
    #[error("analysis: {0}")]
    Pipeline(#[from] PipelineError),
    #[error("statistics: {0}")]
    Agreement(#[from] AgreementError),
    #[error("scenario: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("step length: {0}")]
    StepLength(#[from] StepLengthError),
    #[error("config: {0}")]
    Config(String),
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            CliError::Io { .. } => ExitStatus::Io,
            CliError::Ingest { source, .. } => match source {
                IngestError::InvalidHeight(_) => ExitStatus::Config,
                _ => ExitStatus::Parse,
            },
            CliError::Format { .. } => ExitStatus::Parse,
            CliError::Calibration(e) => match e {
                CalibrationError::TooFewPeaks { .. } => ExitStatus::TooFewPeaks,
                CalibrationError::TooShort(_) => ExitStatus::TooShort,
                CalibrationError::Inconsistent { .. } | CalibrationError::InvalidThreshold(_) => ExitStatus::Config,
                _ => ExitStatus::Parse,
            },
            CliError::Pipeline(e) => match e {
                PipelineError::TooShort(_) => ExitStatus::TooShort,
                PipelineError::UnitMismatch { .. } => ExitStatus::UnitMismatch,
                PipelineError::InvalidWindow(_) => ExitStatus::Config,
                _ => ExitStatus::Analysis,
            },
            CliError::Agreement(e) => match e {
                AgreementError::LengthMismatch { .. } => ExitStatus::LengthMismatch,
                AgreementError::TooFewPairs { .. } => ExitStatus::TooFewPairs,
                _ => ExitStatus::Statistics,
            },
            CliError::Scenario(ScenarioError::Parse(_)) => ExitStatus::InvalidScenario,
            CliError::Scenario(_) => ExitStatus::InvalidScenario,
            CliError::StepLength(_) | CliError::Config(_) => ExitStatus::Config,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitArg {
    G,
    Ms2,
}

impl From<UnitArg> for Unit {
    fn from(u: UnitArg) -> Self {
        match u {
            UnitArg::G => Unit::G,
            UnitArg::Ms2 => Unit::MetersPerSecondSquared,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TimeUnitArg {
    S,
    Ms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PercentBaseArg {
    PairMean,
    Reference,
}

#[derive(Debug, Parser)]
#[command(name = TOOL_NAME, version, about = "Step frequency, step length, distance and velocity from accelerometer recordings")]
pub struct Cli {
    /// TOML or JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Acceleration unit of the input recordings.
    #[arg(long, global = true, value_enum)]
    pub units: Option<UnitArg>,
    /// Write outputs into this directory instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write per-window spectra and frequency decisions (analyze).
    #[arg(long, global = true)]
    pub dump_spectra: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive the activity threshold from a slow calibration walk.
    Calibrate(CalibrateArgs),
    /// Windowed step frequency, length, distance and velocity.
    Analyze(AnalyzeArgs),
    /// Agreement statistics between estimates and references.
    Stats(StatsArgs),
    /// Render a synthetic scenario to CSV plus ground truth.
    Synth(SynthArgs),
    /// Export the step-length model over a frequency/height grid.
    Surface(SurfaceArgs),
}

#[derive(Debug, Clone, Args, Default)]
pub struct IngestArgs {
    #[arg(long)]
    pub time_col: Option<String>,
    #[arg(long)]
    pub x_col: Option<String>,
    #[arg(long)]
    pub y_col: Option<String>,
    /// Anteroposterior axis column.
    #[arg(long)]
    pub z_col: Option<String>,
    #[arg(long, value_enum)]
    pub time_unit: Option<TimeUnitArg>,
    /// Resampling rate; defaults to round(1 / median Δt).
    #[arg(long)]
    pub resample_hz: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub ingest: IngestArgs,
    /// Minimum spacing between step peaks in seconds.
    #[arg(long)]
    pub min_step_separation_s: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub ingest: IngestArgs,
    /// Standing height in meters.
    #[arg(long)]
    pub height: Option<f64>,
    /// Apply the DMD block of the step-length model.
    #[arg(long)]
    pub dmd: bool,
    /// Calibration walk recording (CSV).
    #[arg(long, conflicts_with_all = ["calibration_profile", "threshold"])]
    pub calibration_recording: Option<PathBuf>,
    /// Saved calibration profile (JSON).
    #[arg(long, conflicts_with = "threshold")]
    pub calibration_profile: Option<PathBuf>,
    /// Explicit activity threshold in signal units.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub window_s: Option<f64>,
    #[arg(long)]
    pub band_lo: Option<f64>,
    #[arg(long)]
    pub band_hi: Option<f64>,
    #[arg(long)]
    pub ratio: Option<f64>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Two-column CSV of paired values.
    #[arg(long, conflicts_with_all = ["est", "reference"])]
    pub pairs: Option<PathBuf>,
    /// Estimate files (CSV or JSON), concatenated in order.
    #[arg(long, num_args = 1..)]
    pub est: Vec<PathBuf>,
    /// Reference files (CSV or JSON), concatenated in order.
    #[arg(long = "ref", num_args = 1..)]
    pub reference: Vec<PathBuf>,
    /// Metric label; also the key or column looked up in input files.
    #[arg(long)]
    pub metric: String,
    #[arg(long, default_value = "")]
    pub metric_units: String,
    #[arg(long, default_value = "est")]
    pub est_col: String,
    #[arg(long, default_value = "ref")]
    pub ref_col: String,
    #[arg(long)]
    pub min_pairs: Option<usize>,
    #[arg(long, value_enum)]
    pub percent_base: Option<PercentBaseArg>,
    /// Print the text table on stdout instead of JSON.
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub scenario: PathBuf,
    /// Base name of the output files; defaults to the scenario file stem.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(long, default_value_t = 0.3)]
    pub sf_min: f64,
    #[arg(long, default_value_t = 4.6)]
    pub sf_max: f64,
    #[arg(long, default_value_t = 0.9)]
    pub h_min: f64,
    #[arg(long, default_value_t = 1.9)]
    pub h_max: f64,
    #[arg(long, default_value_t = 25)]
    pub n: usize,
    #[arg(long)]
    pub dmd: bool,
    /// Emit both the control and DMD surfaces.
    #[arg(long, conflicts_with = "dmd")]
    pub both: bool,
}

/// Where the activity threshold comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationSource {
    Recording(PathBuf),
    Profile(PathBuf),
    Threshold(f64),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubjectFile {
    pub height_m: Option<f64>,
    pub dmd: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnsFile {
    pub t: Option<String>,
    pub x: Option<String>,
    pub y: Option<String>,
    pub z: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsFile {
    pub min_pairs: Option<usize>,
    pub percent_base: Option<PercentBase>,
    pub slope_range: Option<(f64, f64)>,
    pub intercept_frac_of_max_ref: Option<f64>,
    pub ccc_acceptable: Option<f64>,
    pub ccc_strong: Option<f64>,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub subject: Option<SubjectFile>,
    pub window_s: Option<f64>,
    pub band_hz: Option<(f64, f64)>,
    pub ratio: Option<f64>,
    pub units: Option<Unit>,
    pub time_unit: Option<TimeUnit>,
    pub columns: Option<ColumnsFile>,
    pub resample_hz: Option<f64>,
    pub min_step_separation_s: Option<f64>,
    pub calibration: Option<CalibrationSource>,
    pub stats: Option<StatsFile>,
}

impl RunConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read_text(path)?;
        let parsed = if text.trim_start().starts_with('{') {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|msg| CliError::Format {
            path: path.to_path_buf(),
            msg,
        })
    }
}

/// Effective settings of a run, echoed into output metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub height_m: Option<f64>,
    pub dmd: bool,
    pub window_s: f64,
    pub band_hz: (f64, f64),
    pub ratio: f64,
    pub noise_floor: f64,
    pub ingest: IngestOptions,
    pub resample_hz: Option<f64>,
    pub min_step_separation_s: f64,
    pub calibration: Option<CalibrationSource>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sel = SelectionConfig::default();
        Self {
            height_m: None,
            dmd: false,
            window_s: AnalysisConfig::default().window_s,
            band_hz: sel.band_hz,
            ratio: sel.ratio,
            noise_floor: sel.noise_floor,
            ingest: IngestOptions::default(),
            resample_hz: None,
            min_step_separation_s: PeakOptions::default().min_step_separation_s,
            calibration: None,
        }
    }
}

impl RunConfig {
    fn layer_file(mut self, f: &RunConfigFile) -> Self {
        if let Some(s) = &f.subject {
            self.height_m = s.height_m.or(self.height_m);
            self.dmd = s.dmd.unwrap_or(self.dmd);
        }
        self.window_s = f.window_s.unwrap_or(self.window_s);
        self.band_hz = f.band_hz.unwrap_or(self.band_hz);
        self.ratio = f.ratio.unwrap_or(self.ratio);
        self.ingest.unit = f.units.unwrap_or(self.ingest.unit);
        self.ingest.time_unit = f.time_unit.unwrap_or(self.ingest.time_unit);
        if let Some(c) = &f.columns {
            let ing = &mut self.ingest;
            for (dst, src) in [
                (&mut ing.time_column, &c.t),
                (&mut ing.x_column, &c.x),
                (&mut ing.y_column, &c.y),
                (&mut ing.z_column, &c.z),
            ] {
                if let Some(v) = src {
                    *dst = v.clone();
                }
            }
        }
        self.resample_hz = f.resample_hz.or(self.resample_hz);
        self.min_step_separation_s = f.min_step_separation_s.unwrap_or(self.min_step_separation_s);
        self.calibration = f.calibration.clone().or(self.calibration.take());
        self
    }

    fn layer_ingest_args(mut self, units: Option<UnitArg>, a: &IngestArgs) -> Self {
        if let Some(u) = units {
            self.ingest.unit = u.into();
        }
        let ing = &mut self.ingest;
        for (dst, src) in [
            (&mut ing.time_column, &a.time_col),
            (&mut ing.x_column, &a.x_col),
            (&mut ing.y_column, &a.y_col),
            (&mut ing.z_column, &a.z_col),
        ] {
            if let Some(v) = src {
                *dst = v.clone();
            }
        }
        if let Some(t) = a.time_unit {
            ing.time_unit = match t {
                TimeUnitArg::S => TimeUnit::Seconds,
                TimeUnitArg::Ms => TimeUnit::Milliseconds,
            };
        }
        self.resample_hz = a.resample_hz.or(self.resample_hz);
        self
    }

    fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig {
            window_s: self.window_s,
            selection: SelectionConfig {
                band_hz: self.band_hz,
                ratio: self.ratio,
                noise_floor: self.noise_floor,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct InputDigest {
    role: &'static str,
    path: String,
    sha256: String,
}

#[derive(Debug, Clone, Serialize)]
struct Metadata<C: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: C,
    inputs: Vec<InputDigest>,
}

impl<C: Serialize> Metadata<C> {
    fn new(command: &'static str, config: C) -> Self {
        Self {
            tool: TOOL_NAME,
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            inputs: Vec::new(),
        }
    }

    fn input(&mut self, role: &'static str, path: &Path, bytes: &[u8]) {
        self.inputs.push(InputDigest {
            role,
            path: path.display().to_string(),
            sha256: output::sha256_hex(bytes),
        });
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let bytes = read_bytes(path)?;
    String::from_utf8(bytes).map_err(|e| CliError::Format {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

/// Reads, validates and resamples a recording. Returns the raw bytes for digests.
fn load_recording(path: &Path, cfg: &RunConfig) -> Result<(ingest::AccelRecording, Vec<u8>), CliError> {
    let bytes = read_bytes(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::Format {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    let wrap = |source| CliError::Ingest {
        path: path.to_path_buf(),
        source,
    };
    let rec = ingest::parse_recording(&text, &cfg.ingest).map_err(wrap)?;
    let target = cfg.resample_hz.map_or(TargetRate::Auto, TargetRate::Hz);
    let rec = ingest::resample_uniform(&rec, target).map_err(wrap)?;
    Ok((rec, bytes))
}

fn load_config(path: Option<&Path>) -> Result<RunConfigFile, CliError> {
    path.map_or_else(|| Ok(RunConfigFile::default()), RunConfigFile::load)
}

/// Parses arguments from the environment and runs the selected command.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Calibrate(a) => cmd_calibrate(&cli, &file, a, stdout),
        Command::Analyze(a) => cmd_analyze(&cli, &file, a, stdout),
        Command::Stats(a) => cmd_stats(&cli, &file, a, stdout),
        Command::Synth(a) => cmd_synth(&cli, a, stdout),
        Command::Surface(a) => cmd_surface(&cli, a, stdout),
    }
}

#[derive(Serialize)]
struct CalibrationOutput<'a> {
    #[serde(flatten)]
    profile: &'a CalibrationProfile,
    peaks: &'a [calibration::StepPeak],
    metadata: Metadata<&'a RunConfig>,
}

pub fn cmd_calibrate(cli: &Cli, file: &RunConfigFile, a: &CalibrateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = RunConfig::default().layer_file(file).layer_ingest_args(cli.units, &a.ingest);
    if let Some(s) = a.min_step_separation_s {
        cfg.min_step_separation_s = s;
    }
    let (rec, bytes) = load_recording(&a.input, &cfg)?;
    let opts = PeakOptions {
        min_step_separation_s: cfg.min_step_separation_s,
        ..PeakOptions::default()
    };
    let peaks = calibration::detect_step_peaks(&rec, &opts)?;
    let values: Vec<f64> = peaks.iter().map(|p| p.value).collect();
    let profile = calibration::compute_threshold(&values, rec.unit())?;

    let mut metadata = Metadata::new("calibrate", &cfg);
    metadata.input("calibration_recording", &a.input, &bytes);
    let json = output::to_json(&CalibrationOutput {
        profile: &profile,
        peaks: &peaks,
        metadata,
    });
    match &cli.out {
        Some(dir) => write_file(&dir.join("calibration.json"), &json),
        None => emit(stdout, &json),
    }
}

fn resolve_calibration(
    source: &CalibrationSource,
    cfg: &RunConfig,
    metadata: &mut Metadata<&RunConfig>,
) -> Result<CalibrationProfile, CliError> {
    match source {
        CalibrationSource::Threshold(t) => Ok(CalibrationProfile::explicit(*t, cfg.ingest.unit)?),
        CalibrationSource::Profile(path) => {
            let bytes = read_bytes(path)?;
            let profile: CalibrationProfile = serde_json::from_slice(&bytes).map_err(|e| CliError::Format {
                path: path.clone(),
                msg: e.to_string(),
            })?;
            profile.validate()?;
            metadata.input("calibration_profile", path, &bytes);
            Ok(profile)
        }
        CalibrationSource::Recording(path) => {
            let (rec, bytes) = load_recording(path, cfg)?;
            metadata.input("calibration_recording", path, &bytes);
            let opts = PeakOptions {
                min_step_separation_s: cfg.min_step_separation_s,
                ..PeakOptions::default()
            };
            Ok(calibration::calibrate(&rec, &opts)?)
        }
    }
}

#[derive(Serialize)]
struct AnalysisOutput<'a> {
    metadata: AnalysisMetadata<'a>,
    summary: &'a pipeline::GaitSummary,
    windows: &'a [pipeline::WindowMetrics],
}

#[derive(Serialize)]
struct AnalysisMetadata<'a> {
    #[serde(flatten)]
    base: Metadata<&'a RunConfig>,
    calibration: CalibrationProfile,
    sf_clamped_windows: usize,
    sl_floored_windows: usize,
    dropped_tail_s: f64,
}

pub fn cmd_analyze(cli: &Cli, file: &RunConfigFile, a: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = RunConfig::default().layer_file(file).layer_ingest_args(cli.units, &a.ingest);
    if let Some(h) = a.height {
        cfg.height_m = Some(h);
    }
    cfg.dmd |= a.dmd;
    cfg.window_s = a.window_s.unwrap_or(cfg.window_s);
    cfg.band_hz = (a.band_lo.unwrap_or(cfg.band_hz.0), a.band_hi.unwrap_or(cfg.band_hz.1));
    cfg.ratio = a.ratio.unwrap_or(cfg.ratio);
    if let Some(p) = &a.calibration_recording {
        cfg.calibration = Some(CalibrationSource::Recording(p.clone()));
    } else if let Some(p) = &a.calibration_profile {
        cfg.calibration = Some(CalibrationSource::Profile(p.clone()));
    } else if let Some(t) = a.threshold {
        cfg.calibration = Some(CalibrationSource::Threshold(t));
    }

    let height = cfg
        .height_m
        .ok_or_else(|| CliError::Config("standing height is required (--height or subject.height_m)".into()))?;
    let subject = SubjectProfile::new(height, cfg.dmd).map_err(|source| CliError::Ingest {
        path: cli.config.clone().unwrap_or_else(|| PathBuf::from("<args>")),
        source,
    })?;
    let source = cfg.calibration.clone().ok_or_else(|| {
        CliError::Config(
            "no calibration source: pass --calibration-recording, --calibration-profile or --threshold".into(),
        )
    })?;

    let mut metadata = Metadata::new("analyze", &cfg);
    let (rec, bytes) = load_recording(&a.input, &cfg)?;
    metadata.input("recording", &a.input, &bytes);
    let cal = resolve_calibration(&source, &cfg, &mut metadata)?;
    let (analysis, diags) = pipeline::analyze_recording_detailed(&rec, &cal, &subject, &cfg.analysis())?;

    let doc = AnalysisOutput {
        metadata: AnalysisMetadata {
            base: metadata,
            calibration: cal,
            sf_clamped_windows: analysis.sf_clamped_windows,
            sl_floored_windows: analysis.sl_floored_windows,
            dropped_tail_s: analysis.dropped_tail_s,
        },
        summary: &analysis.summary,
        windows: &analysis.windows,
    };
    let json = output::to_json(&doc);
    match &cli.out {
        Some(dir) => {
            write_file(&dir.join("analysis.json"), &json)?;
            write_file(&dir.join("windows.csv"), &output::windows_csv(&analysis.windows))?;
            if cli.dump_spectra {
                write_file(&dir.join("spectra.json"), &output::to_json(&diags))?;
            }
            Ok(())
        }
        None => {
            if cli.dump_spectra {
                eprintln!("--dump-spectra needs --out; spectra not written");
            }
            emit(stdout, &json)
        }
    }
}

/// Pulls numbers for `key` out of a JSON document: numbers are taken as-is,
/// arrays are flattened, objects contribute their `key` field or, failing
/// that, the `key` field of their `summary`.
fn extract_json(v: &Value, key: &str) -> Option<Vec<f64>> {
    match v {
        Value::Number(n) => n.as_f64().map(|f| vec![f]),
        Value::Array(items) => {
            let mut out = Vec::new();
            for it in items {
                out.extend(extract_json(it, key)?);
            }
            Some(out)
        }
        Value::Object(map) => map
            .get(key)
            .and_then(|f| extract_json(f, key))
            .or_else(|| map.get("summary").and_then(|s| extract_json(s, key))),
        _ => None,
    }
}

fn csv_column(path: &Path, text: &str, column: &str) -> Result<Vec<f64>, CliError> {
    let fail = |msg: String| CliError::Format {
        path: path.to_path_buf(),
        msg,
    };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| fail(e.to_string()))?.clone();
    let idx = match headers.iter().position(|h| h == column) {
        Some(i) => i,
        None if headers.len() == 1 => 0,
        None => return Err(fail(format!("no column `{column}`"))),
    };
    reader
        .records()
        .map(|r| {
            let r = r.map_err(|e| fail(e.to_string()))?;
            let line = r.position().map_or(0, |p| p.line());
            let field = r.get(idx).ok_or_else(|| fail(format!("line {line}: missing field")))?;
            field
                .parse::<f64>()
                .map_err(|_| fail(format!("line {line}: cannot parse `{field}`")))
        })
        .collect()
}

fn load_values(path: &Path, key: &str) -> Result<(Vec<f64>, Vec<u8>), CliError> {
    let text = read_text(path)?;
    let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with(['{', '[']);
    let values = if is_json {
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Format {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        extract_json(&v, key).ok_or_else(|| CliError::Format {
            path: path.to_path_buf(),
            msg: format!("no numeric `{key}` values found"),
        })?
    } else {
        csv_column(path, &text, key)?
    };
    Ok((values, text.into_bytes()))
}

#[derive(Serialize)]
struct StatsOutput<'a> {
    report: &'a agreement::AgreementReport,
    metadata: Metadata<&'a AgreementThresholds>,
}

pub fn cmd_stats(cli: &Cli, file: &RunConfigFile, a: &StatsArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut th = AgreementThresholds::default();
    if let Some(s) = &file.stats {
        th.min_pairs = s.min_pairs.unwrap_or(th.min_pairs);
        th.percent_base = s.percent_base.unwrap_or(th.percent_base);
        th.slope_range = s.slope_range.unwrap_or(th.slope_range);
        th.intercept_frac_of_max_ref = s.intercept_frac_of_max_ref.unwrap_or(th.intercept_frac_of_max_ref);
        th.ccc_acceptable = s.ccc_acceptable.unwrap_or(th.ccc_acceptable);
        th.ccc_strong = s.ccc_strong.unwrap_or(th.ccc_strong);
    }
    th.min_pairs = a.min_pairs.unwrap_or(th.min_pairs);
    if let Some(b) = a.percent_base {
        th.percent_base = match b {
            PercentBaseArg::PairMean => PercentBase::PairMean,
            PercentBaseArg::Reference => PercentBase::Reference,
        };
    }

    let mut metadata = Metadata::new("stats", &th);
    let (est, reference) = if let Some(p) = &a.pairs {
        let text = read_text(p)?;
        metadata.input("pairs", p, text.as_bytes());
        (csv_column(p, &text, &a.est_col)?, csv_column(p, &text, &a.ref_col)?)
    } else {
        if a.est.is_empty() || a.reference.is_empty() {
            return Err(CliError::Config("pass --pairs, or both --est and --ref".into()));
        }
        let mut est = Vec::new();
        for p in &a.est {
            let (v, bytes) = load_values(p, &a.metric)?;
            metadata.input("est", p, &bytes);
            est.extend(v);
        }
        let mut reference = Vec::new();
        for p in &a.reference {
            let (v, bytes) = load_values(p, &a.metric)?;
            metadata.input("ref", p, &bytes);
            reference.extend(v);
        }
        (est, reference)
    };

    let series = PairedSeries::new(est, reference, a.metric.clone(), a.metric_units.clone())?;
    if series.len() < th.min_pairs {
        return Err(AgreementError::TooFewPairs {
            n: series.len(),
            min: th.min_pairs,
        }
        .into());
    }
    let report = agreement::agreement_report(&series, &th)?;
    let json = output::to_json(&StatsOutput {
        report: &report,
        metadata,
    });
    let table = agreement::render_table(std::slice::from_ref(&report));
    match &cli.out {
        Some(dir) => {
            write_file(&dir.join("report.json"), &json)?;
            write_file(&dir.join("report.txt"), &table)
        }
        None if a.table => emit(stdout, &table),
        None => emit(stdout, &json),
    }
}

#[derive(Serialize)]
struct TruthOutput<'a> {
    #[serde(flatten)]
    truth: &'a synthgen::GroundTruth,
    scenario: &'a GaitScenario,
    metadata: Metadata<()>,
}

pub fn cmd_synth(cli: &Cli, a: &SynthArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = read_text(&a.scenario)?;
    let scenario = GaitScenario::from_str_any(&text)?;
    let (mut rec, truth) = synthgen::generate(&scenario)?;
    if let Some(u) = cli.units {
        let u: Unit = u.into();
        if u != rec.unit() {
            rec = ingest::AccelRecording::new(rec.samples().to_vec(), rec.sample_rate_hz(), u, "z")
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
    }
    let stem = a.name.clone().unwrap_or_else(|| {
        a.scenario
            .file_stem()
            .map_or_else(|| "scenario".to_string(), |s| s.to_string_lossy().into_owned())
    });
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let csv_path = dir.join(format!("{stem}.csv"));
    let truth_path = dir.join(format!("{stem}.truth.json"));

    let mut metadata = Metadata::new("synth", ());
    metadata.input("scenario", &a.scenario, text.as_bytes());
    write_file(&csv_path, &output::recording_csv(&rec))?;
    write_file(
        &truth_path,
        &output::to_json(&TruthOutput {
            truth: &truth,
            scenario: &scenario,
            metadata,
        }),
    )?;
    emit(stdout, &format!("{}\n{}\n", csv_path.display(), truth_path.display()))
}

pub fn cmd_surface(cli: &Cli, a: &SurfaceArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let flags: &[bool] = if a.both { &[false, true] } else if a.dmd { &[true] } else { &[false] };
    let mut points = Vec::new();
    for &dmd in flags {
        points.extend(step_length::surface_grid((a.sf_min, a.sf_max), (a.h_min, a.h_max), a.n, dmd)?);
    }
    let csv = output::surface_csv(&points);
    match &cli.out {
        Some(dir) => write_file(&dir.join("surface.csv"), &csv),
        None => emit(stdout, &csv),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once(TOOL_NAME).chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn defaults_match_published_constants() {
        let c = RunConfig::default();
        assert_eq!(c.window_s, 5.0);
        assert_eq!(c.band_hz, (0.3, 4.6));
        assert_eq!(c.ratio, 0.6);
        assert!(c.calibration.is_none());
    }

    #[test]
    fn flag_beats_file_beats_default() {
        let file: RunConfigFile = toml::from_str(
            r#"
            window_s = 4.0
            ratio = 0.5
            units = "ms2"
            [subject]
            height_m = 1.2
            [columns]
            z = "az"
            [calibration]
            threshold = 0.4
            "#,
        )
        .unwrap();
        let cli = parse(&["--units", "g", "analyze", "in.csv", "--ratio", "0.7", "--z-col", "ap"]);
        let Command::Analyze(a) = &cli.command else { panic!() };
        let cfg = RunConfig::default().layer_file(&file).layer_ingest_args(cli.units, &a.ingest);
        assert_eq!(cfg.window_s, 4.0);
        assert_eq!(cfg.ingest.unit, Unit::G);
        assert_eq!(cfg.ingest.z_column, "ap");
        assert_eq!(cfg.height_m, Some(1.2));
        assert_eq!(cfg.calibration, Some(CalibrationSource::Threshold(0.4)));
        assert_eq!(a.ratio, Some(0.7));
    }

    #[test]
    fn unknown_config_keys_rejected() {
        assert!(toml::from_str::<RunConfigFile>("windw_s = 3").is_err());
    }

    #[test]
    fn json_extraction() {
        let v: Value = serde_json::json!([
            {"summary": {"total_steps": 10.0}},
            {"total_steps": 12.5},
            3.0
        ]);
        assert_eq!(extract_json(&v, "total_steps"), Some(vec![10.0, 12.5, 3.0]));
        assert_eq!(extract_json(&serde_json::json!({"x": 1}), "total_steps"), None);
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            ExitStatus::Ok,
            ExitStatus::Usage,
            ExitStatus::Io,
            ExitStatus::Parse,
            ExitStatus::TooFewPeaks,
            ExitStatus::Config,
            ExitStatus::TooShort,
            ExitStatus::UnitMismatch,
            ExitStatus::LengthMismatch,
            ExitStatus::TooFewPairs,
            ExitStatus::InvalidScenario,
            ExitStatus::Analysis,
            ExitStatus::Statistics,
        ];
        let mut seen: Vec<u8> = codes.iter().map(|c| c.code()).collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), codes.len());
    }
}
