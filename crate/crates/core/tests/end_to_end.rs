mod common;

use gaitfft::agreement::median_errors;
use gaitfft::calibration::{calibrate, detect_step_peaks, PeakOptions};
use gaitfft::ingest::{parse_recording, AccelRecording, IngestOptions, SubjectProfile, Unit};
use gaitfft::output::recording_csv;
use gaitfft::pipeline::{analyze_recording, AnalysisConfig, PipelineError};
use gaitfft::spectral::SelectionRule;
use gaitfft::synthgen::{generate, GaitScenario, GaitSegment};
use gaitfft::{CalibrationProfile, PairedSeries};

fn td(h: f64) -> SubjectProfile {
    SubjectProfile::new(h, false).unwrap()
}

#[test]
fn corpus_steps_and_cadence_recovered() {
    let cal = common::calibration_profile();
    let subject = td(1.3);
    let (mut est, mut truth) = (Vec::new(), Vec::new());
    for (i, sc) in common::corpus().iter().enumerate() {
        let (rec, gt) = generate(sc).unwrap();
        let a = analyze_recording(&rec, &cal, &subject, &AnalysisConfig::default()).unwrap();
        assert!(
            common::pct_err(a.summary.total_steps, gt.total_steps) < 2.0,
            "scenario {i}: {} vs {}",
            a.summary.total_steps,
            gt.total_steps
        );
        assert_eq!(a.windows.len(), gt.window_frequencies.len());
        for (w, &f) in a.windows.iter().zip(&gt.window_frequencies) {
            assert!((w.step_frequency_hz - f).abs() <= 0.05, "scenario {i} window {}", w.window.index);
            assert_eq!(w.active_s, if f > 0.0 { 5 } else { 0 }, "scenario {i} window {}", w.window.index);
        }
        common::aggregation_identities(&a).unwrap();
        let d = common::distance_from_windows(&a, 1.3, false);
        assert!((a.summary.total_distance_m - d).abs() <= 1e-9 * d);
        est.push(a.summary.total_steps);
        truth.push(gt.total_steps);
    }
    let me = median_errors(&PairedSeries::new(est, truth, "steps", "").unwrap()).unwrap();
    assert!(me.mdape.median < 5.0);
}

#[test]
fn strong_second_harmonic_keeps_fundamental() {
    let cal = common::calibration_profile();
    for r in [0.6, 0.75, 0.95] {
        let sc = GaitScenario::new(vec![GaitSegment::walk(30.0, 1.5, 1.0).with_harmonic(r)], 100.0, 0.05, 3);
        let (rec, gt) = generate(&sc).unwrap();
        let a = analyze_recording(&rec, &cal, &td(1.4), &AnalysisConfig::default()).unwrap();
        for w in &a.windows {
            assert!((w.step_frequency_hz - 1.5).abs() <= 0.05, "r={r}: {}", w.step_frequency_hz);
        }
        assert!(common::pct_err(a.summary.total_steps, gt.total_steps) < 2.0);
    }
}

#[test]
fn calibration_on_two_bursts() {
    // Two 5-step bursts at 1 Hz separated by 3 s of stillness.
    let sc = GaitScenario::new(
        vec![GaitSegment::walk(5.0, 1.0, 1.0), GaitSegment::rest(3.0), GaitSegment::walk(5.0, 1.0, 1.0)],
        100.0,
        0.0,
        0,
    );
    let (rec, _) = generate(&sc).unwrap();
    let peaks = detect_step_peaks(&rec, &PeakOptions::default()).unwrap();
    let expected: Vec<f64> = (0..5).map(|k| 0.25 + k as f64).chain((0..5).map(|k| 8.25 + k as f64)).collect();
    assert_eq!(peaks.len(), 10);
    for (p, t) in peaks.iter().zip(&expected) {
        assert!((p.t - t).abs() <= 0.05, "{} vs {t}", p.t);
    }
    let cal = calibrate(&rec, &PeakOptions::default()).unwrap();
    assert_eq!(cal.n_steps_m, 10);
}

#[test]
fn two_hertz_minute_reference_values() {
    let sc = GaitScenario::new(vec![GaitSegment::walk(60.0, 2.0, 1.0)], 100.0, 0.0, 11);
    let (rec, _) = generate(&sc).unwrap();
    let cal = CalibrationProfile::explicit(0.5, Unit::G).unwrap();
    let a = analyze_recording(&rec, &cal, &td(1.3), &AnalysisConfig::default()).unwrap();
    assert!((a.summary.total_steps - 120.0).abs() < 0.5);
    assert_eq!(a.summary.total_steps_rounded, 120);
    assert!((a.summary.total_distance_m - 65.545).abs() < 0.1, "{}", a.summary.total_distance_m);
    assert!(a.windows.iter().all(|w| w.rule == SelectionRule::DominantPeak));

    let dmd = analyze_recording(&rec, &cal, &SubjectProfile::new(1.3, true).unwrap(), &AnalysisConfig::default()).unwrap();
    assert_eq!(dmd.summary.total_steps, a.summary.total_steps);
    assert!(dmd.summary.total_distance_m < a.summary.total_distance_m);
}

#[test]
fn csv_round_trip_preserves_analysis() {
    let sc = GaitScenario::new(
        vec![GaitSegment::walk(20.0, 1.8, 1.0), GaitSegment::rest(5.0), GaitSegment::walk(10.0, 2.6, 0.9)],
        100.0,
        0.1,
        5,
    );
    let (rec, _) = generate(&sc).unwrap();
    let parsed = parse_recording(&recording_csv(&rec), &IngestOptions::default()).unwrap();
    assert!(parsed.is_uniform());
    assert_eq!(parsed.len(), rec.len());
    let cal = common::calibration_profile();
    let a = analyze_recording(&rec, &cal, &td(1.5), &AnalysisConfig::default()).unwrap();
    let b = analyze_recording(&parsed, &cal, &td(1.5), &AnalysisConfig::default()).unwrap();
    assert!((a.summary.total_steps - b.summary.total_steps).abs() < 1e-3);
}

#[test]
fn short_recording_rejected() {
    let rec = AccelRecording::from_uniform_z(&vec![0.0; 150], 100.0, Unit::G).unwrap();
    let cal = CalibrationProfile::explicit(0.5, Unit::G).unwrap();
    let err = analyze_recording(&rec, &cal, &td(1.3), &AnalysisConfig::default()).unwrap_err();
    assert!(matches!(err, PipelineError::TooShort(_)), "{err:?}");
}

#[test]
fn unit_mismatch_rejected() {
    let sc = GaitScenario::new(vec![GaitSegment::walk(10.0, 2.0, 1.0)], 100.0, 0.0, 1);
    let (rec, _) = generate(&sc).unwrap();
    let cal = CalibrationProfile::explicit(5.0, Unit::MetersPerSecondSquared).unwrap();
    let err = analyze_recording(&rec, &cal, &td(1.3), &AnalysisConfig::default()).unwrap_err();
    assert!(matches!(err, PipelineError::UnitMismatch { .. }));
}
