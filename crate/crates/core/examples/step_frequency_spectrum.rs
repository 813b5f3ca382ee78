//! Spectrum of one 5 s window and the step frequency chosen from it.
//!
//! The first window has a strong second harmonic and the fundamental wins
//! through the subharmonic rule. The second window has a weak lower peak that
//! does not qualify.
//!
//! ```text
//! cargo run --example step_frequency_spectrum
//! ```

use std::f64::consts::PI;

use gaitfft::spectral::{fft_magnitude, select_step_frequency, SelectionConfig};

fn window(parts: &[(f64, f64)]) -> Vec<f64> {
    (0..500)
        .map(|i| {
            let t = i as f64 / 100.0;
            parts.iter().map(|(f, a)| a * (2.0 * PI * f * t).sin()).sum()
        })
        .collect()
}

fn main() {
    let cfg = SelectionConfig::default();
    for parts in [[(1.0, 0.7), (2.2, 1.0)], [(1.5, 0.5), (2.2, 1.0)]] {
        let spec = fft_magnitude(&window(&parts), 100.0).expect("valid window");
        let d = select_step_frequency(&spec, &cfg);
        println!("tones {parts:?}");
        println!("  resolution {:.4} Hz over {} bins", spec.resolution_hz, spec.len());
        if let Some(p) = d.dominant {
            println!("  dominant   {:.3} Hz, magnitude {:.3}", p.freq, p.mag);
        }
        if let Some(p) = d.candidate {
            println!("  candidate  {:.3} Hz, magnitude {:.3}", p.freq, p.mag);
        }
        println!("  selected   {:.3} Hz ({:?})", d.frequency_hz, d.rule);
    }
}
