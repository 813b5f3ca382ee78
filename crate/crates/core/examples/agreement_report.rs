//! Agreement between pipeline step counts and ground truth over a small
//! synthetic corpus, reported as JSON-ready statistics and a text table.
//!
//! ```text
//! cargo run --example agreement_report
//! ```

use gaitfft::agreement::{agreement_report, render_table, AgreementThresholds};
use gaitfft::calibration::CalibrationProfile;
use gaitfft::ingest::{SubjectProfile, Unit};
use gaitfft::pipeline::{analyze_recording, AnalysisConfig};
use gaitfft::synthgen::{generate, GaitScenario, GaitSegment};
use gaitfft::PairedSeries;

fn main() {
    let cal = CalibrationProfile::explicit(0.4, Unit::G).unwrap();
    let subject = SubjectProfile::new(1.25, false).unwrap();
    let (mut steps, mut truth) = (Vec::new(), Vec::new());
    for i in 0..16u32 {
        let cadence = 0.9 + 0.2 * f64::from(i);
        let segments = vec![
            GaitSegment::walk(5.0 * f64::from(3 + i % 4), cadence, 1.0).with_harmonic(0.3),
            GaitSegment::rest(5.0),
            GaitSegment::walk(10.0, (cadence * 0.8).max(0.8), 0.9),
        ];
        let (rec, gt) = generate(&GaitScenario::new(segments, 100.0, 0.15, u64::from(i))).unwrap();
        let a = analyze_recording(&rec, &cal, &subject, &AnalysisConfig::default()).unwrap();
        steps.push(a.summary.total_steps);
        truth.push(gt.total_steps);
    }

    let series = PairedSeries::new(steps, truth, "Step count", "steps").unwrap();
    let report = agreement_report(&series, &AgreementThresholds::default()).unwrap();
    print!("{}", render_table(std::slice::from_ref(&report)));
    println!(
        "slope {:.4}, intercept {:.4}, CCC {:.5}, MdAPE {:.3}%, pass: {}",
        report.pb.slope, report.pb.intercept, report.ccc, report.mdape.median, report.verdict.pass
    );
}
