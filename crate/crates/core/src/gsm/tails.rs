//! Tail diagnostics that suggest a mixing family for one margin.
//!
//! A polynomial tail `f(y) ~ |y|^{2λ−1}` calls for a mixing density with tail
//! `d^{λ−1}` (an inverse gamma with shape `−λ`), while a tail
//! `exp(−√(2ψ)|y|)` calls for `exp(−ψd)` (an exponential with rate `ψ`).

use serde::{Deserialize, Serialize};

use crate::dist::special::normal_cdf;
use crate::dist::MixingFamily;
use crate::{Error, Result};

pub const MIN_TAIL_SAMPLES: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailClass {
    Gaussian,
    Polynomial,
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub n: usize,
    pub excess_kurtosis: f64,
    /// Three standard errors of the excess kurtosis under normality.
    pub kurtosis_threshold: f64,
    pub class: TailClass,
    /// Hill estimate of the tail index `a` in `P(|Y| > y) ~ y^{−a}`.
    pub hill_index: f64,
    /// Slope of `−log P(|Y| > y)` against `y` over the top decile.
    pub exponential_rate: f64,
    pub r2_polynomial: f64,
    pub r2_exponential: f64,
    /// Normal-consistent median absolute deviation.
    pub robust_scale: f64,
    /// Correlation of the normal q-q plot.
    pub qq_correlation: f64,
    /// Empirical (q99 − q01)/(q75 − q25) over its normal value.
    pub qq_tail_ratio: f64,
    pub suggestion: MixingFamily,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let (lo, frac) = (h.floor() as usize, h - h.floor());
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Inverse standard normal CDF by bisection on the CDF.
fn normal_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0, 40.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Least-squares fit of `y` on `x`: (slope, R²).
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return (0.0, 0.0);
    }
    (sxy / sxx, sxy * sxy / (sxx * syy))
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (_, r2) = linear_fit(x, y);
    r2.sqrt()
}

/// Classifies the tail of one column and suggests a mixing family.
pub fn recommend_mixing(column: &[f64]) -> Result<TailReport> {
    let n = column.len();
    if n < MIN_TAIL_SAMPLES {
        return Err(Error::TooFewSamples {
            n,
            min: MIN_TAIL_SAMPLES,
        });
    }
    if column.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParams("column contains non-finite values".into()));
    }
    let nf = n as f64;
    let mean = column.iter().sum::<f64>() / nf;
    let m2 = column.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / nf;
    if m2 == 0.0 {
        return Err(Error::ConstantColumn { index: 0 });
    }
    let m4 = column.iter().map(|y| (y - mean).powi(4)).sum::<f64>() / nf;
    let excess_kurtosis = m4 / (m2 * m2) - 3.0;
    let kurtosis_threshold = 3.0 * (24.0 / nf).sqrt();

    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = quantile(&sorted, 0.5);
    let mut abs_dev: Vec<f64> = column.iter().map(|y| (y - median).abs()).collect();
    abs_dev.sort_by(|a, b| b.total_cmp(a));
    let robust_scale = quantile(&{
        let mut a = abs_dev.clone();
        a.reverse();
        a
    }, 0.5)
        / 0.674_489_750_196_081_7;

    // Tail regression over the top decile of |y − median|.
    let k = (n / 10).max(10);
    let top: Vec<f64> = abs_dev[..k].iter().copied().filter(|&x| x > 0.0).collect();
    let log_surv: Vec<f64> = (1..=top.len()).map(|r| (r as f64 / nf).ln()).collect();
    let log_top: Vec<f64> = top.iter().map(|x| x.ln()).collect();
    let (_, r2_polynomial) = linear_fit(&log_top, &log_surv);
    let (exp_slope, r2_exponential) = linear_fit(&top, &log_surv);
    let exponential_rate = -exp_slope;

    // Hill estimator with k = n^0.6 order statistics.
    let kh = ((nf.powf(0.6)) as usize).clamp(10, n - 1);
    let threshold = abs_dev[kh].max(f64::MIN_POSITIVE);
    let hill_index = {
        let s: f64 = abs_dev[..kh].iter().map(|x| (x / threshold).ln()).sum::<f64>() / kh as f64;
        if s > 0.0 {
            1.0 / s
        } else {
            f64::INFINITY
        }
    };

    let normal_q: Vec<f64> = (0..n)
        .map(|i| normal_quantile((i as f64 + 0.5) / nf))
        .collect();
    let qq_correlation = pearson(&normal_q, &sorted);
    let spread = (quantile(&sorted, 0.99) - quantile(&sorted, 0.01))
        / (quantile(&sorted, 0.75) - quantile(&sorted, 0.25)).max(f64::MIN_POSITIVE);
    let qq_tail_ratio = spread / (2.0 * 2.326_347_874_040_840_8 / 1.348_979_500_392_163_5);

    let (class, suggestion) = if excess_kurtosis.abs() < kurtosis_threshold {
        (TailClass::Gaussian, MixingFamily::Degenerate)
    } else if r2_polynomial > r2_exponential && hill_index.is_finite() {
        let shape = hill_index / 2.0;
        (
            TailClass::Polynomial,
            MixingFamily::InverseGamma {
                shape,
                scale: shape * robust_scale * robust_scale,
            },
        )
    } else {
        let rate = exponential_rate.max(f64::MIN_POSITIVE);
        (
            TailClass::Exponential,
            MixingFamily::Exponential {
                rate: rate * rate / 2.0,
            },
        )
    };

    Ok(TailReport {
        n,
        excess_kurtosis,
        kurtosis_threshold,
        class,
        hill_index,
        exponential_rate,
        r2_polynomial,
        r2_exponential,
        robust_scale,
        qq_correlation,
        qq_tail_ratio,
        suggestion,
    })
}
