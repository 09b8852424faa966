//! MSE and PSNR with a fixed peak of 255.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::{GrayImage, PEAK};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityReport {
    pub mse: f64,
    /// `+inf` for identical images.
    pub psnr_db: f64,
}

impl QualityReport {
    pub fn compare(f: &GrayImage, g: &GrayImage) -> Result<Self> {
        let mse = mse(f, g)?;
        Ok(Self {
            mse,
            psnr_db: psnr_from_mse(mse),
        })
    }
}

pub fn mse(f: &GrayImage, g: &GrayImage) -> Result<f64> {
    if (f.width(), f.height()) != (g.width(), g.height()) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            f.width(),
            f.height(),
            g.width(),
            g.height()
        )));
    }
    let sum: f64 = f
        .pixels()
        .iter()
        .zip(g.pixels())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / f.pixels().len() as f64)
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK * PEAK / mse).log10()
    }
}

pub fn psnr(f: &GrayImage, g: &GrayImage) -> Result<f64> {
    Ok(psnr_from_mse(mse(f, g)?))
}
