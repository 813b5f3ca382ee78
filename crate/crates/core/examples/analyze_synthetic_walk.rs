//! Full pipeline on a synthetic walk: calibrate, window, count steps and
//! aggregate, then compare with the generator's ground truth.
//!
//! ```text
//! cargo run --example analyze_synthetic_walk
//! ```

use gaitfft::calibration::{calibrate, PeakOptions};
use gaitfft::ingest::SubjectProfile;
use gaitfft::pipeline::{analyze_recording, AnalysisConfig};
use gaitfft::synthgen::{generate, GaitScenario};

fn main() {
    let calib = GaitScenario::from_str_any(include_str!("data/slow_walk.toml")).unwrap();
    let walk = GaitScenario::from_str_any(include_str!("data/walk.toml")).unwrap();
    let (calib_rec, _) = generate(&calib).unwrap();
    let (rec, truth) = generate(&walk).unwrap();

    let profile = calibrate(&calib_rec, &PeakOptions::default()).expect("calibration walk");
    let subject = SubjectProfile::new(1.32, false).unwrap();
    let analysis = analyze_recording(&rec, &profile, &subject, &AnalysisConfig::default()).unwrap();

    println!("threshold {:.4} g", profile.threshold);
    println!("{:>3} {:>7} {:>6} {:>8} {:>7} {:>7} {:>8}", "tw", "t0", "active", "sf", "steps", "SL", "v");
    for w in &analysis.windows {
        println!(
            "{:>3} {:>7.1} {:>6} {:>8.3} {:>7.2} {:>7.3} {:>8.3}",
            w.window.index, w.window.t_start, w.active_s, w.step_frequency_hz, w.steps, w.step_length_m, w.velocity_mps
        );
    }
    let s = &analysis.summary;
    println!(
        "steps {:.2} (truth {}), active {} s of {} s, distance {:.2} m, mean velocity {:.3} m/s, p95 {:.3} m/s",
        s.total_steps, truth.total_steps, s.active_duration_s, s.total_duration_s, s.total_distance_m,
        s.avg_step_velocity_mps, s.p95_step_velocity_mps
    );
}
