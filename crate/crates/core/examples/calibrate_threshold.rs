//! Derive the activity threshold from a very slow calibration walk.
//!
//! ```text
//! cargo run --example calibrate_threshold
//! ```

use gaitfft::calibration::{compute_threshold, detect_step_peaks, PeakOptions};
use gaitfft::synthgen::{generate, GaitScenario};

fn main() {
    let text = include_str!("data/slow_walk.toml");
    let scenario = GaitScenario::from_str_any(text).expect("valid scenario");
    let (rec, truth) = generate(&scenario).expect("renders");

    let peaks = detect_step_peaks(&rec, &PeakOptions::default()).expect("enough steps");
    println!("{} steps walked, {} peaks found", truth.total_steps, peaks.len());
    for p in peaks.iter().take(5) {
        println!("  t = {:6.3} s  z = {:.4}", p.t, p.value);
    }

    let values: Vec<f64> = peaks.iter().map(|p| p.value).collect();
    let profile = compute_threshold(&values, rec.unit()).expect("valid peaks");
    println!(
        "threshold = {:.4} + {:.4} = {:.4} {}",
        profile.mu_peaks, profile.sigma_peaks, profile.threshold, profile.unit
    );
}
