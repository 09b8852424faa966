//! Wavelet-domain thresholding and BayesShrink threshold selection.
//!
//! The noise level is estimated once, from the finest diagonal (`HH`) band,
//! with the median estimator `median(|g|) / 0.6745`. Each detail band then
//! gets its own threshold `σ² / σ_s`, where `σ_s² = max(σ_w² − σ², 0)` and
//! `σ_w²` is the band's mean square. A band whose signal variance vanishes
//! is removed entirely (threshold = its largest magnitude). The approximation
//! band is never modified.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::matrix::Matrix;
use crate::wavelet::{decompose, reconstruct, Band};

/// Scale factor of the median absolute deviation for a standard normal.
pub const MAD_TO_SIGMA: f64 = 0.6745;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ThresholdRule {
    Hard(f64),
    Soft(f64),
    /// Soft thresholding with a per-band BayesShrink threshold.
    #[default]
    BayesSoft,
}

impl ThresholdRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ThresholdRule::Hard(l) | ThresholdRule::Soft(l) => check_lambda(l),
            ThresholdRule::BayesSoft => Ok(()),
        }
    }
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdRule::Hard(l) => write!(f, "hard:{l}"),
            ThresholdRule::Soft(l) => write!(f, "soft:{l}"),
            ThresholdRule::BayesSoft => f.write_str("bayes-soft"),
        }
    }
}

impl FromStr for ThresholdRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let rule = match lower.split_once(':') {
            None if matches!(lower.as_str(), "bayes-soft" | "bayes_soft" | "bayes") => {
                ThresholdRule::BayesSoft
            }
            Some((kind @ ("hard" | "soft"), num)) => {
                let l: f64 = num
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad threshold in {s:?}")))?;
                if kind == "hard" {
                    ThresholdRule::Hard(l)
                } else {
                    ThresholdRule::Soft(l)
                }
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unrecognized rule {s:?}; expected hard:LAMBDA, soft:LAMBDA or bayes-soft"
                )))
            }
        };
        rule.validate()?;
        Ok(rule)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "threshold {lambda} must be finite and non-negative"
        )))
    }
}

/// Keep-or-kill: `u` if `|u| > λ`, else 0.
#[inline]
pub fn hard(u: f64, lambda: f64) -> f64 {
    if u.abs() > lambda {
        u
    } else {
        0.0
    }
}

/// Shrinkage: `sgn(u) · max(0, |u| − λ)`.
#[inline]
pub fn soft(u: f64, lambda: f64) -> f64 {
    let mag = u.abs() - lambda;
    if mag > 0.0 {
        mag.copysign(u)
    } else {
        0.0
    }
}

pub fn hard_threshold(coeffs: &Matrix, lambda: f64) -> Result<Matrix> {
    check_lambda(lambda)?;
    Ok(coeffs.map(|u| hard(u, lambda)))
}

pub fn soft_threshold(coeffs: &Matrix, lambda: f64) -> Result<Matrix> {
    check_lambda(lambda)?;
    Ok(coeffs.map(|u| soft(u, lambda)))
}

/// Median of the values; even counts average the two middle order statistics.
fn median(mut values: Vec<f64>) -> f64 {
    let n = values.len();
    values.sort_unstable_by(f64::total_cmp);
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Robust noise standard deviation from a diagonal detail band.
pub fn estimate_noise_sigma(hh1: &Matrix) -> f64 {
    median(hh1.values().iter().map(|v| v.abs()).collect()) / MAD_TO_SIGMA
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubbandStats {
    pub sigma_noise: f64,
    pub sigma_w: f64,
    pub sigma_s: f64,
    pub lambda: f64,
}

/// BayesShrink threshold for one detail band.
pub fn bayes_threshold(subband: &Matrix, sigma_noise: f64) -> Result<SubbandStats> {
    if sigma_noise.is_nan() || sigma_noise < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise sigma {sigma_noise} must be non-negative"
        )));
    }
    let var_w = subband.energy() / subband.values().len() as f64;
    let var_n = sigma_noise * sigma_noise;
    let sigma_s = (var_w - var_n).max(0.0).sqrt();
    let lambda = if sigma_s > 0.0 {
        var_n / sigma_s
    } else {
        subband.max_abs()
    };
    Ok(SubbandStats {
        sigma_noise,
        sigma_w: var_w.sqrt(),
        sigma_s,
        lambda,
    })
}

/// Per-band record of what [`denoise`] did, one CSV row each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandReport {
    pub level: usize,
    pub band: Band,
    pub sigma_noise: f64,
    pub sigma_w: f64,
    pub sigma_s: f64,
    pub lambda: f64,
    /// Coefficients that were nonzero before thresholding and zero after.
    pub zeroed: usize,
}

/// Decompose, threshold every detail band, reconstruct.
pub fn denoise(
    img: &GrayImage,
    levels: usize,
    rule: ThresholdRule,
) -> Result<(GrayImage, Vec<BandReport>)> {
    rule.validate()?;
    let mut pyramid = decompose(img, levels)?;
    let sigma_noise = estimate_noise_sigma(&pyramid.details[0].hh);
    let mut reports = Vec::with_capacity(3 * levels);
    for (i, detail) in pyramid.details.iter_mut().enumerate() {
        for band in Band::ALL {
            let coeffs = detail.band_mut(band);
            let bayes = bayes_threshold(coeffs, sigma_noise)?;
            let (lambda, shrunk) = match rule {
                ThresholdRule::Hard(l) => (l, hard_threshold(coeffs, l)?),
                ThresholdRule::Soft(l) => (l, soft_threshold(coeffs, l)?),
                ThresholdRule::BayesSoft => (bayes.lambda, soft_threshold(coeffs, bayes.lambda)?),
            };
            let zeroed = coeffs
                .values()
                .iter()
                .zip(shrunk.values())
                .filter(|(before, after)| **before != 0.0 && **after == 0.0)
                .count();
            *coeffs = shrunk;
            reports.push(BandReport {
                level: i + 1,
                band,
                sigma_noise,
                sigma_w: bayes.sigma_w,
                sigma_s: bayes.sigma_s,
                lambda,
                zeroed,
            });
        }
    }
    Ok((reconstruct(&pyramid)?, reports))
}
