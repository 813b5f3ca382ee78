//! Acceptance report: one line per criterion.
//!
//! Runs without the libtest harness so every line reaches stdout. The process
//! fails if a criterion fails unexpectedly, or if a criterion listed in
//! [`KNOWN_DEFECTS`] starts passing (the listed expectation is wrong, so a pass
//! means the implementation drifted from the published coefficients).

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use common::oracle::{ccc_oracle, pb_oracle, random_series};
use gaitfft::agreement::{agreement_report, lins_ccc, median_errors, passing_bablok, AgreementThresholds};
use gaitfft::calibration::compute_threshold;
use gaitfft::ingest::{SubjectProfile, Unit};
use gaitfft::pipeline::{analyze_recording, AnalysisConfig, GaitAnalysis};
use gaitfft::spectral::{fft_magnitude, select_step_frequency, SelectionConfig, Spectrum};
use gaitfft::step_length::StepLengthModel;
use gaitfft::synthgen::{generate, GaitScenario, GaitSegment};
use gaitfft::{CalibrationProfile, PairedSeries};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// Criteria whose stated expectation contradicts the stated inputs.
///
/// AC1: the DMD value at sf = 1, h = 1 is the sum of all eight coefficients,
/// 0.202531 + (1.87948 - 1.689478 - 1.865428 + 1.664073) = 0.191178, not the
/// 0.192178 the criterion quotes.
const KNOWN_DEFECTS: &[&str] = &["AC1"];

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: &'static str, title: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome { id, title, pass, detail }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn ac1() -> Outcome {
    let m = StepLengthModel::PUBLISHED;
    let td = m.predict_raw(1.0, 1.0, false).unwrap().step_length_m;
    let dmd = m.predict_raw(1.0, 1.0, true).unwrap().step_length_m;
    let pass = close(td, 0.202531, 1e-6) && close(dmd, 0.192178, 1e-6);
    outcome(
        "AC1",
        "step length at sf=1, h=1",
        pass,
        format!("TD {td:.6} (want 0.202531), DMD {dmd:.6} (want 0.192178)"),
    )
}

fn tone(f: f64, amp: f64, phase: f64) -> impl Fn(usize) -> f64 {
    move |i| amp * (2.0 * PI * f * i as f64 / 100.0 + phase).sin()
}

fn ac2() -> Outcome {
    let start = Instant::now();
    let cfg = SelectionConfig::default();
    let mut worst: f64 = 0.0;
    for k in 1..=9 {
        let f0 = 0.5 * k as f64;
        let z: Vec<f64> = (0..500).map(tone(f0, 1.0, 0.3)).collect();
        let d = select_step_frequency(&fft_magnitude(&z, 100.0).unwrap(), &cfg);
        worst = worst.max((d.frequency_hz - f0).abs());
    }
    let z: Vec<f64> = (0..500).map(tone(5.0, 1.0, 0.3)).collect();
    let out_of_band = select_step_frequency(&fft_magnitude(&z, 100.0).unwrap(), &cfg).frequency_hz;
    let secs = start.elapsed().as_secs_f64();
    outcome(
        "AC2",
        "pure-tone step frequency",
        worst <= 0.05 && out_of_band == 0.0 && secs < 1.0,
        format!("max error {worst:.4} Hz over 0.5..4.5 Hz, 5.0 Hz -> {out_of_band} Hz, {secs:.3} s"),
    )
}

/// Spectrum at 0.01 Hz resolution with triangular peaks.
fn two_peak_spectrum(peaks: &[(f64, f64)]) -> Spectrum {
    let mut mags = vec![0.0f64; 1001];
    for &(f, m) in peaks {
        let k = (f / 0.01).round() as usize;
        for d in 0..10usize {
            let v = m * (1.0 - d as f64 / 10.0);
            mags[k + d] = mags[k + d].max(v);
            mags[k - d] = mags[k - d].max(v);
        }
    }
    Spectrum::from_magnitudes(mags, 0.01).unwrap()
}

fn ac3() -> Outcome {
    let cfg = SelectionConfig::default();
    let a = select_step_frequency(&two_peak_spectrum(&[(1.0, 0.7), (2.2, 1.0)]), &cfg).frequency_hz;
    let b = select_step_frequency(&two_peak_spectrum(&[(1.5, 0.5), (2.2, 1.0)]), &cfg).frequency_hz;
    // The same pairs as time-domain tones.
    let sig = |f1: f64, a1: f64| -> f64 {
        let z: Vec<f64> = (0..500).map(|i| tone(f1, a1, 0.0)(i) + tone(2.2, 1.0, 0.7)(i)).collect();
        select_step_frequency(&fft_magnitude(&z, 100.0).unwrap(), &cfg).frequency_hz
    };
    let (ta, tb) = (sig(1.0, 0.7), sig(1.5, 0.5));
    let pass = close(a, 1.0, 1e-9) && close(b, 2.2, 1e-9) && close(ta, 1.0, 0.05) && close(tb, 2.2, 0.05);
    outcome(
        "AC3",
        "subharmonic preference",
        pass,
        format!("spectra: {a:.3}, {b:.3} Hz; tones: {ta:.3}, {tb:.3} Hz (want 1.0, 2.2)"),
    )
}

fn ac4(analyses: &mut Vec<GaitAnalysis>) -> Outcome {
    let start = Instant::now();
    let cal = common::calibration_profile();
    let subject = SubjectProfile::new(1.3, false).unwrap();
    let corpus = common::corpus();
    let (mut est, mut truth) = (Vec::new(), Vec::new());
    let (mut worst_steps, mut worst_dist): (f64, f64) = (0.0, 0.0);
    for sc in &corpus {
        let (rec, gt) = generate(sc).unwrap();
        let a = analyze_recording(&rec, &cal, &subject, &AnalysisConfig::default()).unwrap();
        worst_steps = worst_steps.max(common::pct_err(a.summary.total_steps, gt.total_steps));
        let d = common::distance_from_windows(&a, 1.3, false);
        worst_dist = worst_dist.max((a.summary.total_distance_m - d).abs() / d);
        est.push(a.summary.total_steps);
        truth.push(gt.total_steps);
        analyses.push(a);
    }
    let mdape = median_errors(&PairedSeries::new(est, truth, "steps", "").unwrap())
        .unwrap()
        .mdape
        .median;
    let secs = start.elapsed().as_secs_f64();
    outcome(
        "AC4",
        "synthetic corpus end to end",
        corpus.len() >= 20 && worst_steps <= 2.0 && worst_dist <= 1e-6 && mdape < 5.0 && secs < 30.0,
        format!(
            "{} scenarios, worst step error {worst_steps:.3}%, distance rel. error {worst_dist:.1e}, MdAPE {mdape:.3}%, {secs:.2} s",
            corpus.len()
        ),
    )
}

fn ac5() -> Outcome {
    let p = compute_threshold(&[1.0, 1.2, 1.4], Unit::G).unwrap();
    outcome(
        "AC5",
        "calibration threshold",
        close(p.threshold, 1.363299, 1e-6),
        format!("threshold {:.6} (want 1.363299)", p.threshold),
    )
}

fn ac6() -> Outcome {
    let mut failures = Vec::new();

    let v: Vec<f64> = (1..=12).map(|i| 10.0 + 2.5 * i as f64).collect();
    let id = agreement_report(&PairedSeries::new(v.clone(), v, "m", "").unwrap(), &AgreementThresholds::default()).unwrap();
    let identity_ok = id.ba.mean_pct_diff == 0.0
        && id.ba.loa_lo == 0.0
        && id.ba.loa_hi == 0.0
        && id.pb.slope == 1.0
        && id.pb.intercept == 0.0
        && id.ccc == 1.0
        && id.mdae.median == 0.0
        && id.mdape.median == 0.0;
    if !identity_ok {
        failures.push("identity".to_string());
    }

    let est: Vec<f64> = (1..=15).map(f64::from).collect();
    let reference: Vec<f64> = est.iter().map(|e| 2.0 * e + 3.0).collect();
    let pb = passing_bablok(&PairedSeries::new(est, reference, "m", "").unwrap(), 10).unwrap();
    if pb.slope != 2.0 || pb.intercept != 3.0 {
        failures.push(format!("affine slope {} intercept {}", pb.slope, pb.intercept));
    }

    let mut rng = Xoshiro256PlusPlus::seed_from_u64(6);
    let mut compared = 0;
    for n in 3..=12 {
        for trial in 0..100 {
            let (x, y) = random_series(&mut rng, n, trial % 2 == 0);
            let s = PairedSeries::new(x.clone(), y.clone(), "m", "").unwrap();
            if let (Ok(pb), Some((b, a, _, _))) = (passing_bablok(&s, 3), pb_oracle(&x, &y)) {
                compared += 1;
                if !close(pb.slope, b, 1e-9 * b.abs().max(1.0)) || !close(pb.intercept, a, 1e-9 * a.abs().max(1.0)) {
                    failures.push(format!("PB on {x:?}"));
                }
            }
            if let Ok(c) = lins_ccc(&s) {
                if !close(c, ccc_oracle(&x, &y), 1e-9) {
                    failures.push(format!("CCC on {x:?}"));
                }
            }
        }
    }
    outcome(
        "AC6",
        "agreement statistics",
        failures.is_empty(),
        if failures.is_empty() {
            format!("identity and affine exact, {compared} series (n = 3..12) match oracles to 1e-9")
        } else {
            failures.join("; ")
        },
    )
}

fn ac7(analyses: &mut Vec<GaitAnalysis>) -> Outcome {
    let cal = CalibrationProfile::explicit(0.5, Unit::G).unwrap();
    let extra = [
        vec![GaitSegment::walk(60.0, 2.0, 1.0)],
        vec![GaitSegment::rest(12.0)],
        vec![GaitSegment::walk(7.0, 4.4, 1.0), GaitSegment::rest(4.0), GaitSegment::walk(11.5, 0.5, 1.2)],
    ];
    for segments in extra {
        let (rec, _) = generate(&GaitScenario::new(segments, 100.0, 0.05, 8)).unwrap();
        for dmd in [false, true] {
            let subject = SubjectProfile::new(1.1, dmd).unwrap();
            analyses.push(analyze_recording(&rec, &cal, &subject, &AnalysisConfig::default()).unwrap());
        }
    }
    let errors: Vec<String> = analyses.iter().filter_map(|a| common::aggregation_identities(a).err()).collect();
    outcome(
        "AC7",
        "aggregation identities",
        errors.is_empty(),
        if errors.is_empty() {
            format!("{} analyses checked", analyses.len())
        } else {
            errors.join("; ")
        },
    )
}

fn ac8() -> Outcome {
    let m = StepLengthModel::PUBLISHED;
    let pinned = [
        m.intercept,
        m.sqrt_sf,
        m.inv_sqrt_h,
        m.interaction,
        m.dmd_intercept,
        m.dmd_sqrt_sf,
        m.dmd_inv_sqrt_h,
        m.dmd_interaction,
    ] == [-2.505019, 3.33758, 2.442582, -3.072612, 1.87948, -1.689478, -1.865428, 1.664073];
    outcome(
        "AC8",
        "clinical results substituted",
        pinned,
        "clinical fit statistics and agreement tables need the unavailable dataset; \
         covered instead by AC2-AC7 and the pinned coefficients"
            .to_string(),
    )
}

fn main() -> ExitCode {
    let mut analyses = Vec::new();
    let outcomes = vec![
        ac1(),
        ac2(),
        ac3(),
        ac4(&mut analyses),
        ac5(),
        ac6(),
        ac7(&mut analyses),
        ac8(),
    ];
    let mut unexpected = 0;
    for o in &outcomes {
        let known = KNOWN_DEFECTS.contains(&o.id);
        let tag = match (o.pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL",
            (true, true) => "PASS",
        };
        let note = match (o.pass, known) {
            (false, true) => " [known defect in the stated expectation]",
            (true, true) => " [listed as a known defect but passed]",
            _ => "",
        };
        println!("[{tag}] {} {}: {}{note}", o.id, o.title, o.detail);
        if o.pass == known {
            unexpected += 1;
        }
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("{passed}/{} criteria passed, {unexpected} unexpected", outcomes.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
