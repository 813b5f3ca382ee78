//! Method-comparison statistics for paired estimate/reference series:
//! Bland-Altman percent differences, Passing-Bablok regression, Lin's
//! concordance correlation coefficient and median absolute (percent) errors.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Two-sided 95% normal quantile used by Passing-Bablok confidence bounds.
const Z_975: f64 = 1.959_963_984_540_054;
/// Multiplier for Bland-Altman limits of agreement and mean confidence interval.
const BA_Z: f64 = 1.96;

#[derive(Debug, Error, PartialEq)]
pub enum AgreementError {
    #[error("series lengths differ: {est} estimates vs {reference} references")]
    LengthMismatch { est: usize, reference: usize },
    #[error("need at least {min} pairs, got {n}")]
    TooFewPairs { n: usize, min: usize },
    #[error("non-finite value in pair {0}")]
    NonFinite(usize),
    #[error("pair {0} has a zero mean, percent difference undefined")]
    ZeroPairMean(usize),
    #[error("pair {0} has a zero reference, percent error undefined")]
    ZeroReference(usize),
    #[error("all estimates are identical, slopes undefined")]
    DegenerateX,
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
}

/// Estimates paired with reference (ground-truth) values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSeries {
    est: Vec<f64>,
    reference: Vec<f64>,
    pub metric: String,
    pub units: String,
}

impl PairedSeries {
    pub const MIN_PAIRS: usize = 3;

    pub fn new(
        est: Vec<f64>,
        reference: Vec<f64>,
        metric: impl Into<String>,
        units: impl Into<String>,
    ) -> Result<Self, AgreementError> {
        if est.len() != reference.len() {
            return Err(AgreementError::LengthMismatch {
                est: est.len(),
                reference: reference.len(),
            });
        }
        if est.len() < Self::MIN_PAIRS {
            return Err(AgreementError::TooFewPairs {
                n: est.len(),
                min: Self::MIN_PAIRS,
            });
        }
        if let Some(i) = (0..est.len()).find(|&i| !est[i].is_finite() || !reference[i].is_finite()) {
            return Err(AgreementError::NonFinite(i));
        }
        Ok(Self {
            est,
            reference,
            metric: metric.into(),
            units: units.into(),
        })
    }

    pub fn est(&self) -> &[f64] {
        &self.est
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn len(&self) -> usize {
        self.est.len()
    }

    pub fn is_empty(&self) -> bool {
        self.est.is_empty()
    }

    /// Same pairs with the roles of estimate and reference exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            est: self.reference.clone(),
            reference: self.est.clone(),
            metric: self.metric.clone(),
            units: self.units.clone(),
        }
    }
}

/// Linear-interpolation quantile between order statistics (Hyndman-Fan
/// type 7). `sorted` must be ascending and non-empty.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, q)
}

fn median_of(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    quantile_sorted(values, 0.5)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Denominator for percent differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PercentBase {
    #[default]
    PairMean,
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlandAltman {
    pub mean_pct_diff: f64,
    pub sd_pct_diff: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub loa_lo: f64,
    pub loa_hi: f64,
}

/// Per-pair percent differences `100 (est - ref) / base`.
pub fn percent_differences(s: &PairedSeries, base: PercentBase) -> Result<Vec<f64>, AgreementError> {
    s.est
        .iter()
        .zip(&s.reference)
        .enumerate()
        .map(|(i, (&e, &r))| {
            let denom = match base {
                PercentBase::PairMean => (e + r) / 2.0,
                PercentBase::Reference => r,
            };
            if denom == 0.0 {
                Err(match base {
                    PercentBase::PairMean => AgreementError::ZeroPairMean(i),
                    PercentBase::Reference => AgreementError::ZeroReference(i),
                })
            } else {
                Ok(100.0 * (e - r) / denom)
            }
        })
        .collect()
}

/// Bland-Altman analysis on percent differences. Limits are
/// `mean ± 1.96 sd` with the sample (n - 1) standard deviation; the
/// confidence interval of the mean uses `sd / √n`.
pub fn bland_altman_pct(s: &PairedSeries, base: PercentBase) -> Result<BlandAltman, AgreementError> {
    let d = percent_differences(s, base)?;
    let n = d.len() as f64;
    let m = mean(&d);
    let sd = (d.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let half_ci = BA_Z * sd / n.sqrt();
    Ok(BlandAltman {
        mean_pct_diff: m,
        sd_pct_diff: sd,
        ci95_lo: m - half_ci,
        ci95_hi: m + half_ci,
        loa_lo: m - BA_Z * sd,
        loa_hi: m + BA_Z * sd,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassingBablok {
    pub slope: f64,
    pub slope_ci95: (f64, f64),
    pub intercept: f64,
    pub intercept_ci95: (f64, f64),
    /// Number of pairwise slopes used.
    pub n_slopes: usize,
    /// Offset applied to the median position (count of slopes below -1).
    pub offset_k: usize,
}

/// Passing-Bablok regression of reference (y) on estimate (x).
///
/// Pairwise slopes with equal x are skipped and slopes of exactly -1 are
/// discarded. The slope is the median of the sorted slopes shifted up by the
/// number of slopes below -1. Confidence bounds use the rank offsets
/// `M1 = round((N - C) / 2)`, `M2 = N - M1 + 1` with
/// `C = z · √(n (n - 1)(2n + 5) / 18)`.
pub fn passing_bablok(s: &PairedSeries, min_pairs: usize) -> Result<PassingBablok, AgreementError> {
    let n = s.len();
    if n < min_pairs {
        return Err(AgreementError::TooFewPairs { n, min: min_pairs });
    }
    let (x, y) = (&s.est, &s.reference);
    let mut slopes = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[j] - x[i];
            if dx == 0.0 {
                continue;
            }
            let sl = (y[j] - y[i]) / dx;
            if sl != -1.0 {
                slopes.push(sl);
            }
        }
    }
    if slopes.is_empty() {
        return Err(AgreementError::DegenerateX);
    }
    slopes.sort_by(f64::total_cmp);
    let big_n = slopes.len();
    let k = slopes.partition_point(|&v| v < -1.0);

    // 1-based rank, clamped into the slope list
    let at = |rank: usize| slopes[rank.clamp(1, big_n) - 1];
    let slope = if big_n % 2 == 1 {
        at(big_n.div_ceil(2) + k)
    } else {
        0.5 * (at(big_n / 2 + k) + at(big_n / 2 + 1 + k))
    };

    let nf = n as f64;
    let c = Z_975 * (nf * (nf - 1.0) * (2.0 * nf + 5.0) / 18.0).sqrt();
    let m1 = ((big_n as f64 - c) / 2.0).round().max(1.0) as usize;
    let m2 = (big_n + 1).saturating_sub(m1).max(1);
    let slope_lo = at(m1 + k);
    let slope_hi = at(m2 + k);

    let intercept_at = |b: f64| {
        let mut r: Vec<f64> = x.iter().zip(y).map(|(xi, yi)| yi - b * xi).collect();
        median_of(&mut r)
    };
    Ok(PassingBablok {
        slope,
        slope_ci95: (slope_lo, slope_hi),
        intercept: intercept_at(slope),
        intercept_ci95: (intercept_at(slope_hi), intercept_at(slope_lo)),
        n_slopes: big_n,
        offset_k: k,
    })
}

/// Lin's concordance correlation coefficient with population moments.
pub fn lins_ccc(s: &PairedSeries) -> Result<f64, AgreementError> {
    let (x, y) = (&s.est, &s.reference);
    let n = x.len() as f64;
    let (mx, my) = (mean(x), mean(y));
    let sxx = x.iter().map(|v| (v - mx).powi(2)).sum::<f64>() / n;
    let syy = y.iter().map(|v| (v - my).powi(2)).sum::<f64>() / n;
    if sxx == 0.0 {
        return Err(AgreementError::ZeroVariance("estimates"));
    }
    if syy == 0.0 {
        return Err(AgreementError::ZeroVariance("references"));
    }
    let sxy = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / n;
    Ok((2.0 * sxy / (sxx + syy + (mx - my).powi(2))).clamp(-1.0, 1.0))
}

/// Pearson correlation, for comparison with the concordance coefficient.
pub fn pearson(s: &PairedSeries) -> Result<f64, AgreementError> {
    let (x, y) = (&s.est, &s.reference);
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return Err(AgreementError::ZeroVariance("series"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedianIqr {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

impl MedianIqr {
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Self {
            median: quantile_sorted(&v, 0.5),
            q1: quantile_sorted(&v, 0.25),
            q3: quantile_sorted(&v, 0.75),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedianErrors {
    pub mdae: MedianIqr,
    pub mdape: MedianIqr,
}

/// Absolute errors `|est - ref|`.
pub fn absolute_errors(s: &PairedSeries) -> Vec<f64> {
    s.est.iter().zip(&s.reference).map(|(e, r)| (e - r).abs()).collect()
}

/// Median absolute error and median absolute percent error (relative to
/// `|ref|`), each with its interquartile range.
pub fn median_errors(s: &PairedSeries) -> Result<MedianErrors, AgreementError> {
    if let Some(i) = s.reference.iter().position(|&r| r == 0.0) {
        return Err(AgreementError::ZeroReference(i));
    }
    let abs = absolute_errors(s);
    let pct: Vec<f64> = abs.iter().zip(&s.reference).map(|(a, r)| 100.0 * a / r.abs()).collect();
    Ok(MedianErrors {
        mdae: MedianIqr::of(&abs),
        mdape: MedianIqr::of(&pct),
    })
}

/// Acceptance thresholds applied to a report. Defaults follow the usual
/// reading: slope within [0.9, 1.1], intercept within 2% of the largest
/// reference value, concordance above 0.9 (acceptable) or 0.95 (strong).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgreementThresholds {
    pub slope_range: (f64, f64),
    pub intercept_frac_of_max_ref: f64,
    pub ccc_acceptable: f64,
    pub ccc_strong: f64,
    pub min_pairs: usize,
    pub percent_base: PercentBase,
}

impl Default for AgreementThresholds {
    fn default() -> Self {
        Self {
            slope_range: (0.9, 1.1),
            intercept_frac_of_max_ref: 0.02,
            ccc_acceptable: 0.9,
            ccc_strong: 0.95,
            min_pairs: 10,
            percent_base: PercentBase::PairMean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementVerdict {
    pub slope_ok: bool,
    pub intercept_ok: bool,
    /// Slope CI contains 1 and intercept CI contains 0.
    pub pb_strong: bool,
    pub ccc_acceptable: bool,
    pub ccc_strong: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub metric: String,
    pub units: String,
    pub n: usize,
    pub ba: BlandAltman,
    pub pb: PassingBablok,
    pub ccc: f64,
    pub mdae: MedianIqr,
    pub mdape: MedianIqr,
    pub thresholds: AgreementThresholds,
    pub verdict: AgreementVerdict,
}

pub fn agreement_report(s: &PairedSeries, thresholds: &AgreementThresholds) -> Result<AgreementReport, AgreementError> {
    let ba = bland_altman_pct(s, thresholds.percent_base)?;
    let pb = passing_bablok(s, thresholds.min_pairs)?;
    let ccc = lins_ccc(s)?;
    let me = median_errors(s)?;

    let max_ref = s.reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (slo, shi) = thresholds.slope_range;
    let slope_ok = (slo..=shi).contains(&pb.slope);
    let intercept_ok = pb.intercept.abs() <= thresholds.intercept_frac_of_max_ref * max_ref;
    let pb_strong = pb.slope_ci95.0 <= 1.0
        && 1.0 <= pb.slope_ci95.1
        && pb.intercept_ci95.0 <= 0.0
        && 0.0 <= pb.intercept_ci95.1;
    let ccc_acceptable = ccc >= thresholds.ccc_acceptable;
    let ccc_strong = ccc > thresholds.ccc_strong;
    Ok(AgreementReport {
        metric: s.metric.clone(),
        units: s.units.clone(),
        n: s.len(),
        ba,
        pb,
        ccc,
        mdae: me.mdae,
        mdape: me.mdape,
        thresholds: *thresholds,
        verdict: AgreementVerdict {
            slope_ok,
            intercept_ok,
            pb_strong,
            ccc_acceptable,
            ccc_strong,
            pass: slope_ok && intercept_ok && ccc_acceptable,
        },
    })
}

/// Text table with one row per report, columns grouped as regression, Bland-Altman,
/// concordance and median errors.
pub fn render_table(reports: &[AgreementReport]) -> String {
    let header = [
        "Metric",
        "n",
        "PB slope [95% CI]",
        "PB intercept [95% CI]",
        "BA mean % diff [95% CI]",
        "Limits of agreement (%)",
        "Lin's rho_c",
        "MdAE [IQR]",
        "MdAPE % [IQR]",
        "Pass",
    ];
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let metric = if r.units.is_empty() {
                r.metric.clone()
            } else {
                format!("{} ({})", r.metric, r.units)
            };
            vec![
                metric,
                r.n.to_string(),
                format!("{:.3} [{:.3}, {:.3}]", r.pb.slope, r.pb.slope_ci95.0, r.pb.slope_ci95.1),
                format!(
                    "{:.3} [{:.3}, {:.3}]",
                    r.pb.intercept, r.pb.intercept_ci95.0, r.pb.intercept_ci95.1
                ),
                format!("{:.2} [{:.2}, {:.2}]", r.ba.mean_pct_diff, r.ba.ci95_lo, r.ba.ci95_hi),
                format!("{:.2} to {:.2}", r.ba.loa_lo, r.ba.loa_hi),
                format!("{:.3}", r.ccc),
                format!("{:.3} [{:.3}-{:.3}]", r.mdae.median, r.mdae.q1, r.mdae.q3),
                format!("{:.2} [{:.2}-{:.2}]", r.mdape.median, r.mdape.q1, r.mdape.q3),
                if r.verdict.pass { "yes" } else { "no" }.to_string(),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |cells: &[&str], out: &mut String| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "| {} |", parts.join(" | "));
    };
    line(&header, &mut out);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    let _ = writeln!(out, "|-{}-|", rule.join("-|-"));
    for r in &rows {
        let cells: Vec<&str> = r.iter().map(String::as_str).collect();
        line(&cells, &mut out);
    }
    out
}
