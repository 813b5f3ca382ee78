//! Naive reference implementations used as test oracles.

use std::f64::consts::PI;

use gaitfft::spectral::{hann, padded_len};
use rand::Rng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// O(n²) one-sided DFT of the mean-removed, Hann-tapered, zero-padded signal.
pub fn dft_magnitude(signal: &[f64]) -> Vec<f64> {
    let n = signal.len();
    let l = padded_len(n);
    let w = hann(n);
    let mean = signal.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = signal.iter().zip(&w).map(|(v, w)| (v - mean) * w).collect();
    let gain: f64 = w.iter().sum();
    (0..=l / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, v) in x.iter().enumerate() {
                let ang = -2.0 * PI * (k * t % l) as f64 / l as f64;
                re += v * ang.cos();
                im += v * ang.sin();
            }
            2.0 * (re * re + im * im).sqrt() / gain
        })
        .collect()
}

/// Passing-Bablok written from the textbook description: collect slopes of
/// every pair with distinct x, drop slopes equal to -1, shift the median rank
/// by the count of slopes below -1.
pub fn pb_oracle(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64, f64)> {
    let mut slopes = Vec::new();
    for j in 0..x.len() {
        for i in 0..j {
            if x[i] != x[j] {
                let s = (y[i] - y[j]) / (x[i] - x[j]);
                if s != -1.0 {
                    slopes.push(s);
                }
            }
        }
    }
    if slopes.is_empty() {
        return None;
    }
    slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let big_n = slopes.len();
    let k = slopes.iter().filter(|&&s| s < -1.0).count();
    let pick = |r: usize| slopes[r.max(1).min(big_n) - 1];
    let b = if big_n % 2 == 1 {
        pick(big_n.div_ceil(2) + k)
    } else {
        (pick(big_n / 2 + k) + pick(big_n / 2 + k + 1)) / 2.0
    };
    let n = x.len() as f64;
    let c = 1.959964 * (n * (n - 1.0) * (2.0 * n + 5.0) / 18.0).sqrt();
    let m1 = (((big_n as f64 - c) / 2.0).round() as i64).max(1) as usize;
    let m2 = (big_n + 1 - m1).max(1);
    let median = |mut v: Vec<f64>| {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let m = v.len();
        if m % 2 == 1 { v[m / 2] } else { (v[m / 2 - 1] + v[m / 2]) / 2.0 }
    };
    let a = median(x.iter().zip(y).map(|(xi, yi)| yi - b * xi).collect());
    Some((b, a, pick(m1 + k), pick(m2 + k)))
}

/// Concordance as one minus the mean squared deviation over its value under
/// independence.
pub fn ccc_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let msd = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / n;
    let vx = x.iter().map(|a| a * a).sum::<f64>() / n - mx * mx;
    let vy = y.iter().map(|b| b * b).sum::<f64>() / n - my * my;
    1.0 - msd / (vx + vy + (mx - my).powi(2))
}

/// Positive series with `y` roughly `0.9 x`; integer draws give ties.
pub fn random_series(rng: &mut Xoshiro256PlusPlus, n: usize, integer: bool) -> (Vec<f64>, Vec<f64>) {
    let draw = |rng: &mut Xoshiro256PlusPlus| {
        if integer {
            f64::from(rng.random_range(1..8i32))
        } else {
            rng.random_range(0.5..20.0)
        }
    };
    let x: Vec<f64> = (0..n).map(|_| draw(rng)).collect();
    let y: Vec<f64> = x.iter().map(|v| 0.9 * v + draw(rng) * 0.3).collect();
    (x, y)
}

