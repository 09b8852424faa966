//! Evaluation protocol: noise × decomposition level grid with PSNR and
//! corner counts.
//!
//! For every noise model the clean image is corrupted once (same seed for
//! all levels), then denoised at each level. Rows come out in a fixed order:
//! noise models in configuration order, levels ascending.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::harris::{harris, CornerThreshold, HarrisParams};
use crate::image::GrayImage;
use crate::metrics::QualityReport;
use crate::noise::{NoiseKind, NoiseSpec};
use crate::shrink::{denoise, ThresholdRule};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub noises: Vec<NoiseKind>,
    pub levels: Vec<usize>,
    pub rule: ThresholdRule,
    pub harris: HarrisParams,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            noises: vec![
                NoiseKind::Gaussian {
                    mean: 0.0,
                    variance: 0.01,
                },
                NoiseKind::Speckle { variance: 0.04 },
                NoiseKind::SaltPepper { density: 0.05 },
            ],
            levels: vec![1, 2],
            rule: ThresholdRule::BayesSoft,
            harris: HarrisParams::default(),
            seed: 42,
        }
    }
}

/// Harris settings flattened into CSV columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarrisColumns {
    pub harris_k: f64,
    pub harris_sigma: f64,
    pub harris_radius: usize,
    pub harris_threshold: f64,
    pub harris_threshold_mode: &'static str,
    pub harris_nms_radius: usize,
}

impl From<&HarrisParams> for HarrisColumns {
    fn from(p: &HarrisParams) -> Self {
        let (mode, value) = match p.threshold {
            CornerThreshold::Relative(f) => ("relative", f),
            CornerThreshold::Absolute(t) => ("absolute", t),
        };
        Self {
            harris_k: p.k,
            harris_sigma: p.window_sigma,
            harris_radius: p.window_radius,
            harris_threshold: value,
            harris_threshold_mode: mode,
            harris_nms_radius: p.nms_radius,
        }
    }
}

/// One line of the PSNR table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsnrRow {
    pub noise: String,
    pub seed: u64,
    pub wavelet: &'static str,
    pub rule: String,
    pub levels: usize,
    pub mse_noisy: f64,
    pub psnr_noisy: f64,
    pub mse_denoised: f64,
    pub psnr_denoised: f64,
    pub harris_k: f64,
    pub harris_sigma: f64,
    pub harris_radius: usize,
    pub harris_threshold: f64,
    pub harris_threshold_mode: &'static str,
    pub harris_nms_radius: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Original,
    Noisy,
    Denoised,
}

/// One line of the corner-count table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerRow {
    pub stage: Stage,
    pub noise: String,
    pub seed: Option<u64>,
    pub wavelet: Option<&'static str>,
    pub rule: Option<String>,
    pub levels: Option<usize>,
    pub corners: usize,
    pub harris_k: f64,
    pub harris_sigma: f64,
    pub harris_radius: usize,
    pub harris_threshold: f64,
    pub harris_threshold_mode: &'static str,
    pub harris_nms_radius: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub psnr: Vec<PsnrRow>,
    pub corners: Vec<CornerRow>,
}

impl BenchReport {
    pub fn original_corners(&self) -> Option<usize> {
        self.corners
            .iter()
            .find(|r| r.stage == Stage::Original)
            .map(|r| r.corners)
    }

    pub fn noisy_corners(&self, noise: &NoiseKind) -> Option<usize> {
        let name = noise.to_string();
        self.corners
            .iter()
            .find(|r| r.stage == Stage::Noisy && r.noise == name)
            .map(|r| r.corners)
    }

    pub fn denoised_corners(&self, noise: &NoiseKind, levels: usize) -> Option<usize> {
        let name = noise.to_string();
        self.corners
            .iter()
            .find(|r| r.stage == Stage::Denoised && r.noise == name && r.levels == Some(levels))
            .map(|r| r.corners)
    }

    pub fn psnr_row(&self, noise: &NoiseKind, levels: usize) -> Option<&PsnrRow> {
        let name = noise.to_string();
        self.psnr
            .iter()
            .find(|r| r.noise == name && r.levels == levels)
    }

    pub fn write_psnr_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        write_rows(out, &self.psnr)
    }

    pub fn write_corners_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        write_rows(out, &self.corners)
    }
}

/// Writes serializable rows with a header line, LF line endings.
pub fn write_rows<W: Write, R: Serialize>(out: W, rows: &[R]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run_bench(clean: &GrayImage, cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.harris.validate()?;
    cfg.rule.validate()?;
    let hc = HarrisColumns::from(&cfg.harris);
    let corner_row =
        |stage: Stage, noise: String, seed: Option<u64>, levels: Option<usize>, corners: usize| {
            CornerRow {
                stage,
                noise,
                seed,
                wavelet: levels.map(|_| "haar"),
                rule: levels.map(|_| cfg.rule.to_string()),
                levels,
                corners,
                harris_k: hc.harris_k,
                harris_sigma: hc.harris_sigma,
                harris_radius: hc.harris_radius,
                harris_threshold: hc.harris_threshold,
                harris_threshold_mode: hc.harris_threshold_mode,
                harris_nms_radius: hc.harris_nms_radius,
            }
        };

    let mut report = BenchReport::default();
    let original = harris(clean, &cfg.harris)?.len();
    report.corners.push(corner_row(
        Stage::Original,
        "none".into(),
        None,
        None,
        original,
    ));

    let mut denoised_rows = Vec::new();
    for kind in &cfg.noises {
        let noisy = NoiseSpec::new(*kind, cfg.seed).apply(clean)?;
        let noisy_q = QualityReport::compare(clean, &noisy)?;
        let noisy_count = harris(&noisy, &cfg.harris)?.len();
        report.corners.push(corner_row(
            Stage::Noisy,
            kind.to_string(),
            Some(cfg.seed),
            None,
            noisy_count,
        ));
        for &levels in &cfg.levels {
            let (restored, _) = denoise(&noisy, levels, cfg.rule)?;
            let q = QualityReport::compare(clean, &restored)?;
            report.psnr.push(PsnrRow {
                noise: kind.to_string(),
                seed: cfg.seed,
                wavelet: "haar",
                rule: cfg.rule.to_string(),
                levels,
                mse_noisy: noisy_q.mse,
                psnr_noisy: noisy_q.psnr_db,
                mse_denoised: q.mse,
                psnr_denoised: q.psnr_db,
                harris_k: hc.harris_k,
                harris_sigma: hc.harris_sigma,
                harris_radius: hc.harris_radius,
                harris_threshold: hc.harris_threshold,
                harris_threshold_mode: hc.harris_threshold_mode,
                harris_nms_radius: hc.harris_nms_radius,
            });
            denoised_rows.push(corner_row(
                Stage::Denoised,
                kind.to_string(),
                Some(cfg.seed),
                Some(levels),
                harris(&restored, &cfg.harris)?.len(),
            ));
        }
    }
    report.corners.extend(denoised_rows);
    Ok(report)
}
