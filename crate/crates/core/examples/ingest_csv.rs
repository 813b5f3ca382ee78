//! Parse a CSV with jittered timestamps and put it on a uniform grid.
//!
//! ```text
//! cargo run --example ingest_csv
//! ```

use std::fmt::Write;

use gaitfft::ingest::{parse_recording, resample_uniform, IngestOptions, TargetRate, TimeUnit};

fn main() {
    // Millisecond timestamps around 100 Hz with a few ms of jitter and
    // non-default column names.
    let mut csv = String::from("time_ms,ax,ay,az\n");
    let mut t = 0.0;
    for i in 0..1200 {
        let z = (2.0 * std::f64::consts::PI * 1.5 * t / 1000.0).sin();
        writeln!(csv, "{t:.1},0.01,-0.02,{z:.5}").unwrap();
        t += 10.0 + [-2.0, 1.5, 0.0, 0.5][i % 4];
    }

    let opts = IngestOptions {
        time_column: "time_ms".into(),
        x_column: "ax".into(),
        y_column: "ay".into(),
        z_column: "az".into(),
        time_unit: TimeUnit::Milliseconds,
        ..IngestOptions::default()
    };
    let raw = parse_recording(&csv, &opts).expect("valid csv");
    println!(
        "parsed {} samples over {:.3} s, median dt {:.4} s, uniform: {}",
        raw.len(),
        raw.span_s(),
        raw.median_dt(),
        raw.is_uniform()
    );

    for target in [TargetRate::Auto, TargetRate::Hz(50.0)] {
        let rec = resample_uniform(&raw, target).expect("dense enough");
        println!(
            "{target:?}: {} samples at {:.3} Hz, uniform: {}",
            rec.len(),
            rec.sample_rate_hz(),
            rec.is_uniform()
        );
    }
}
