//! Deterministic serialisation for emitted files.
//!
//! Every floating-point value written by the CLI is rounded to six
//! significant digits. JSON keeps struct field order.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::ingest::AccelRecording;
use crate::pipeline::WindowMetrics;
use crate::step_length::SurfacePoint;

/// Rounds to six significant digits.
pub fn sig6(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.5e}").parse().expect("formatted float parses")
}

/// Shortest decimal rendering of [`sig6`]`(v)`.
pub fn fmt6(v: f64) -> String {
    let r = sig6(v);
    if r == 0.0 {
        "0".to_string()
    } else {
        r.to_string()
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let f = n.as_f64().expect("f64 number");
            if let Some(num) = serde_json::Number::from_f64(sig6(f)) {
                *n = num;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Converts to a JSON value with all floats rounded.
pub fn to_rounded_value<T: Serialize>(value: &T) -> Value {
    let mut v = serde_json::to_value(value).expect("serialisable value");
    round_value(&mut v);
    v
}

/// Pretty-printed JSON with six-significant-digit floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(&to_rounded_value(value)).expect("serialisable value");
    s.push('\n');
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub const WINDOWS_CSV_HEADER: &str = "index,t_start,active_s,step_frequency_hz,steps,step_length_m,distance_m,velocity_mps";

/// One row per window.
pub fn windows_csv(metrics: &[WindowMetrics]) -> String {
    let mut out = String::from(WINDOWS_CSV_HEADER);
    out.push('\n');
    for m in metrics {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            m.window.index,
            fmt6(m.window.t_start),
            m.active_s,
            fmt6(m.step_frequency_hz),
            fmt6(m.steps),
            fmt6(m.step_length_m),
            fmt6(m.distance_m),
            fmt6(m.velocity_mps),
        );
    }
    out
}

/// Recording as `t,x,y,z`. Time is written with six decimals so a uniform
/// grid stays uniform after re-ingestion; axis values use six significant
/// digits.
pub fn recording_csv(rec: &AccelRecording) -> String {
    let mut out = String::from("t,x,y,z\n");
    for s in rec.samples() {
        let _ = writeln!(out, "{:.6},{},{},{}", s.t, fmt6(s.x), fmt6(s.y), fmt6(s.z));
    }
    out
}

pub fn surface_csv(points: &[SurfacePoint]) -> String {
    let mut out = String::from("sf,h,dmd,step_length_m\n");
    for p in points {
        let _ = writeln!(out, "{},{},{},{}", fmt6(p.sf), fmt6(p.h), u8::from(p.dmd), fmt6(p.step_length_m));
    }
    out
}
