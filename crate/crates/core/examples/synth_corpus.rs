//! Write a corpus of synthetic recordings with their ground truth, ready for
//! `gaitfft analyze` and `gaitfft stats`.
//!
//! ```text
//! cargo run --example synth_corpus -- /tmp/corpus
//! ```

use std::fs;
use std::path::PathBuf;

use gaitfft::output::{recording_csv, to_json};
use gaitfft::synthgen::{generate, GaitScenario, GaitSegment};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("gaitfft-corpus"));
    fs::create_dir_all(&dir).expect("output directory");

    for (i, cadence) in [0.8, 1.4, 2.0, 2.6, 3.2, 4.0].into_iter().enumerate() {
        let scenario = GaitScenario::new(
            vec![GaitSegment::walk(20.0, cadence, 1.0).with_harmonic(0.25), GaitSegment::rest(5.0)],
            100.0,
            0.1,
            i as u64,
        );
        let (rec, truth) = generate(&scenario).expect("valid scenario");
        let stem = format!("walk_{i:02}");
        fs::write(dir.join(format!("{stem}.csv")), recording_csv(&rec)).unwrap();
        fs::write(dir.join(format!("{stem}.truth.json")), to_json(&truth)).unwrap();
        println!("{stem}: {cadence} Hz, {} steps", truth.total_steps);
    }
    println!("written to {}", dir.display());
}
