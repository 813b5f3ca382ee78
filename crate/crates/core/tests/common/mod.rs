#![allow(dead_code)]

pub mod oracle;

use gaitfft::calibration::{calibrate, CalibrationProfile, PeakOptions};
use gaitfft::pipeline::GaitAnalysis;
use gaitfft::step_length::StepLengthModel;
use gaitfft::synthgen::{generate, GaitScenario, GaitSegment};

/// Slow, low-amplitude calibration walk.
pub fn calibration_profile() -> CalibrationProfile {
    let sc = GaitScenario::new(vec![GaitSegment::walk(20.0, 0.8, 0.4)], 100.0, 0.02, 4242);
    let (rec, _) = generate(&sc).unwrap();
    calibrate(&rec, &PeakOptions::default()).unwrap()
}

/// Deterministic mixed corpus: cadences 0.8 to 4.0 Hz, rests, second
/// harmonics and noise up to 20% of the signal amplitude. Segment lengths are
/// multiples of 5 s.
pub fn corpus() -> Vec<GaitScenario> {
    let cadences = [0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.6, 2.8, 3.0, 3.2, 3.4, 3.6, 3.8, 4.0];
    (0..24)
        .map(|i| {
            let c1 = cadences[i % cadences.len()];
            let c2 = cadences[(i * 7 + 3) % cadences.len()];
            let amp = 0.8 + 0.05 * (i % 9) as f64;
            let harmonic = [0.0, 0.3, 0.6, 0.9][i % 4];
            let noise = amp * [0.0, 0.05, 0.1, 0.2][(i / 4) % 4];
            let mut segments = vec![GaitSegment::walk(5.0 * (4 + i % 5) as f64, c1, amp).with_harmonic(harmonic)];
            if i % 3 == 0 {
                segments.push(GaitSegment::rest(5.0 * (1 + i % 2) as f64));
            }
            segments.push(GaitSegment::walk(5.0 * (3 + i % 4) as f64, c2, amp).with_harmonic(harmonic / 2.0));
            if i % 5 == 1 {
                segments.push(GaitSegment::rest(10.0));
            }
            GaitScenario::new(segments, 100.0, noise, 1000 + i as u64)
        })
        .collect()
}

/// Distance recomputed from per-window steps and frequencies.
pub fn distance_from_windows(a: &GaitAnalysis, height_m: f64, dmd: bool) -> f64 {
    a.windows
        .iter()
        .map(|w| {
            if w.step_frequency_hz == 0.0 {
                return 0.0;
            }
            let sf = w.step_frequency_hz.clamp(0.3, 4.6);
            w.steps * StepLengthModel::PUBLISHED.evaluate(sf, height_m, dmd).max(0.0)
        })
        .sum()
}

/// Post-run identities every analysis must satisfy. Returns the first
/// violated one.
pub fn aggregation_identities(a: &GaitAnalysis) -> Result<(), String> {
    let s = &a.summary;
    let dist: f64 = a.windows.iter().map(|w| w.distance_m).sum();
    if (s.total_distance_m - dist).abs() > 1e-9 * dist.max(1.0) {
        return Err(format!("total distance {} != window sum {dist}", s.total_distance_m));
    }
    let sf = s.total_steps / s.total_duration_s;
    if (s.avg_step_frequency_hz - sf).abs() > 1e-12 * sf.max(1.0) {
        return Err(format!("avg frequency {} != steps/duration {sf}", s.avg_step_frequency_hz));
    }
    if s.active_duration_s > s.total_duration_s + 1e-9 {
        return Err(format!("active {} > total {}", s.active_duration_s, s.total_duration_s));
    }
    Ok(())
}

/// Relative error in percent.
pub fn pct_err(est: f64, truth: f64) -> f64 {
    100.0 * (est - truth).abs() / truth.abs()
}
