//! Step length from step frequency and standing height.
//!
//! ```text
//! SL(sf, h) = a1·√sf + a2/√h + a3·√sf/√h + a0
//!           + DMD·(d0 + d1·√sf + d2/√h + d3·√sf/√h)
//! ```
//!
//! with the published mixed-model coefficients below. Step frequency is in
//! steps per second, height in meters, step length in meters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::SubjectProfile;

#[derive(Debug, Error, PartialEq)]
pub enum StepLengthError {
    #[error("step frequency must be finite and non-negative, got {0}")]
    InvalidFrequency(f64),
    #[error("height must be finite and positive, got {0}")]
    InvalidHeight(f64),
    #[error("empty grid: {0}")]
    EmptyGrid(&'static str),
    #[error("grid range {0} outside the model domain")]
    OutOfDomain(&'static str),
}

/// Regression coefficients. [`StepLengthModel::PUBLISHED`] is the only
/// instance the pipeline uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepLengthModel {
    pub intercept: f64,
    pub sqrt_sf: f64,
    pub inv_sqrt_h: f64,
    pub interaction: f64,
    pub dmd_intercept: f64,
    pub dmd_sqrt_sf: f64,
    pub dmd_inv_sqrt_h: f64,
    pub dmd_interaction: f64,
    /// Step frequencies are clamped into this range before evaluation.
    pub sf_clamp_hz: (f64, f64),
}

impl StepLengthModel {
    pub const PUBLISHED: StepLengthModel = StepLengthModel {
        intercept: -2.505019,
        sqrt_sf: 3.33758,
        inv_sqrt_h: 2.442582,
        interaction: -3.072612,
        dmd_intercept: 1.87948,
        dmd_sqrt_sf: -1.689478,
        dmd_inv_sqrt_h: -1.865428,
        dmd_interaction: 1.664073,
        sf_clamp_hz: (0.3, 4.6),
    };

    /// Unclamped, unfloored typically-developing part of the model.
    pub fn td_term(&self, sf: f64, height_m: f64) -> f64 {
        let (r, g) = (sf.sqrt(), 1.0 / height_m.sqrt());
        self.sqrt_sf * r + self.inv_sqrt_h * g + self.interaction * r * g + self.intercept
    }

    /// The additive DMD block.
    pub fn dmd_term(&self, sf: f64, height_m: f64) -> f64 {
        let (r, g) = (sf.sqrt(), 1.0 / height_m.sqrt());
        self.dmd_intercept + self.dmd_sqrt_sf * r + self.dmd_inv_sqrt_h * g + self.dmd_interaction * r * g
    }

    /// Raw regression value with no clamping or flooring.
    pub fn evaluate(&self, sf: f64, height_m: f64, dmd: bool) -> f64 {
        let base = self.td_term(sf, height_m);
        if dmd {
            base + self.dmd_term(sf, height_m)
        } else {
            base
        }
    }

    pub fn predict(&self, sf: f64, subject: &SubjectProfile) -> Result<StepLengthPrediction, StepLengthError> {
        self.predict_raw(sf, subject.height_m(), subject.dmd())
    }

    /// Step length with the pipeline's guards: `sf = 0` means no motion and
    /// yields 0, other frequencies are clamped into `sf_clamp_hz`, and negative
    /// results are floored at 0. Both adjustments are flagged.
    pub fn predict_raw(&self, sf: f64, height_m: f64, dmd: bool) -> Result<StepLengthPrediction, StepLengthError> {
        if !sf.is_finite() || sf < 0.0 {
            return Err(StepLengthError::InvalidFrequency(sf));
        }
        if !height_m.is_finite() || height_m <= 0.0 {
            return Err(StepLengthError::InvalidHeight(height_m));
        }
        if sf == 0.0 {
            return Ok(StepLengthPrediction::default());
        }
        let (lo, hi) = self.sf_clamp_hz;
        let used = sf.clamp(lo, hi);
        let raw = self.evaluate(used, height_m, dmd);
        Ok(StepLengthPrediction {
            step_length_m: raw.max(0.0),
            clamped: used != sf,
            floored: raw < 0.0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepLengthPrediction {
    pub step_length_m: f64,
    /// The step frequency was outside the model band and got clamped.
    pub clamped: bool,
    /// The regression went negative and was floored at zero.
    pub floored: bool,
}

/// [`StepLengthModel::PUBLISHED`] applied to a subject.
pub fn predict(sf: f64, subject: &SubjectProfile) -> Result<StepLengthPrediction, StepLengthError> {
    StepLengthModel::PUBLISHED.predict(sf, subject)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub sf: f64,
    pub h: f64,
    pub dmd: bool,
    pub step_length_m: f64,
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

/// `n × n` grid of predictions, row-major with step frequency as the outer
/// index. Both ranges must lie inside the model domain
/// (sf in the clamp band, h in [0.5, 2.5]).
pub fn surface_grid(
    sf_range: (f64, f64),
    h_range: (f64, f64),
    n: usize,
    dmd: bool,
) -> Result<Vec<SurfacePoint>, StepLengthError> {
    let model = StepLengthModel::PUBLISHED;
    if n == 0 {
        return Err(StepLengthError::EmptyGrid("n must be at least 1"));
    }
    if sf_range.0.partial_cmp(&sf_range.1).is_none_or(|o| o.is_gt()) {
        return Err(StepLengthError::EmptyGrid("step frequency range"));
    }
    if h_range.0.partial_cmp(&h_range.1).is_none_or(|o| o.is_gt()) {
        return Err(StepLengthError::EmptyGrid("height range"));
    }
    let (lo, hi) = model.sf_clamp_hz;
    if sf_range.0 < lo || sf_range.1 > hi {
        return Err(StepLengthError::OutOfDomain("step frequency"));
    }
    if h_range.0 < 0.5 || h_range.1 > 2.5 {
        return Err(StepLengthError::OutOfDomain("height"));
    }
    let mut out = Vec::with_capacity(n * n);
    for sf in linspace(sf_range.0, sf_range.1, n) {
        for h in linspace(h_range.0, h_range.1, n) {
            let p = model.predict_raw(sf, h, dmd)?;
            out.push(SurfacePoint {
                sf,
                h,
                dmd,
                step_length_m: p.step_length_m,
            });
        }
    }
    Ok(out)
}
