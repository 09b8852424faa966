//! Command-line driver.
//!
//! Exit codes: 0 success, 2 usage error, 3 I/O error, 4 validation error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::bench::{run_bench, write_rows, BenchConfig, HarrisColumns};
use crate::error::{Error, PgmError};
use crate::harris::{annotate, harris, CornerSet, CornerThreshold, HarrisParams};
use crate::image::{load_pgm, write_pgm, GrayImage};
use crate::metrics::QualityReport;
use crate::noise::{NoiseKind, NoiseSpec};
use crate::shrink::{denoise, BandReport, ThresholdRule};
use crate::synth;
use crate::wavelet::{band_to_image, decompose, max_levels, Band};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Pgm(#[from] PgmError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error(transparent)]
    Validation(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Pgm(_) | CliError::Io { .. } | CliError::Csv { .. } => 3,
            CliError::Validation(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "wavecorner",
    version,
    about = "Wavelet denoising and Harris corner detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optionally add noise, then denoise with wavelet thresholding.
    Denoise(DenoiseArgs),
    /// Detect Harris corners, optionally after noise and denoising.
    Corners(CornersArgs),
    /// Run the PSNR / corner-count grid over noise models and levels.
    Bench(BenchArgs),
    /// Render a synthetic test image.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Denoised,
    Corners,
    Annotated,
    Stats,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    /// Input PGM (P2 or P5).
    #[arg(long)]
    pub input: PathBuf,
    /// Directory for all outputs; created if missing.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Noise to inject first: gaussian:MEAN:VAR, speckle:VAR or salt-pepper:DENSITY (unit scale).
    #[arg(long, value_parser = parse_noise)]
    pub noise: Option<NoiseKind>,
    /// Wavelet decomposition levels.
    #[arg(long, default_value_t = 2)]
    pub levels: usize,
    /// hard:LAMBDA, soft:LAMBDA or bayes-soft.
    #[arg(long, default_value = "bayes-soft", value_parser = parse_rule)]
    pub rule: ThresholdRule,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Write PGM outputs as plain-text P2 instead of binary P5.
    #[arg(long)]
    pub ascii: bool,
    /// Outputs to write (comma separated).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub emit: Option<Vec<Emit>>,
}

#[derive(Debug, Clone, Args)]
pub struct HarrisArgs {
    #[arg(long, default_value_t = 0.04)]
    pub harris_k: f64,
    /// Gaussian window standard deviation in pixels.
    #[arg(long, default_value_t = 1.0)]
    pub harris_sigma: f64,
    /// Gaussian window radius in pixels.
    #[arg(long, default_value_t = 3)]
    pub harris_radius: usize,
    /// Minimum response as a fraction of the image maximum.
    #[arg(long, default_value_t = 0.01, conflicts_with = "harris_abs_threshold")]
    pub harris_rel_threshold: f64,
    /// Minimum response as an absolute value (overrides the relative threshold).
    #[arg(long)]
    pub harris_abs_threshold: Option<f64>,
    /// Non-maximum suppression radius (Chebyshev).
    #[arg(long, default_value_t = 1)]
    pub harris_nms_radius: usize,
}

impl HarrisArgs {
    pub fn params(&self) -> HarrisParams {
        HarrisParams {
            k: self.harris_k,
            window_sigma: self.harris_sigma,
            window_radius: self.harris_radius,
            threshold: match self.harris_abs_threshold {
                Some(t) => CornerThreshold::Absolute(t),
                None => CornerThreshold::Relative(self.harris_rel_threshold),
            },
            nms_radius: self.harris_nms_radius,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DenoiseArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Clean reference for PSNR when the input is already noisy.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Also write every sub-band as a rescaled PGM.
    #[arg(long)]
    pub dump_bands: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CornersArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Denoise before detecting corners.
    #[arg(long)]
    pub denoise: bool,
    #[command(flatten)]
    pub harris: HarrisArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Clean reference PGM.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Decomposition levels to evaluate (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2])]
    pub levels: Vec<usize>,
    #[arg(long, default_value = "bayes-soft", value_parser = parse_rule)]
    pub rule: ThresholdRule,
    #[command(flatten)]
    pub harris: HarrisArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    Scene,
    Square,
    Checkerboard,
    Ramp,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    #[arg(long, default_value_t = 512)]
    pub size: usize,
    #[arg(long)]
    pub output: PathBuf,
}

fn parse_noise(s: &str) -> Result<NoiseKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rule(s: &str) -> Result<ThresholdRule, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parameters repeated on every row of the per-run CSV files.
#[derive(Debug, Clone, Serialize)]
struct StatsRow {
    noise: String,
    seed: u64,
    levels: usize,
    rule: String,
    level: usize,
    band: Band,
    sigma_noise: f64,
    sigma_w: f64,
    sigma_s: f64,
    lambda: f64,
    zeroed: usize,
}

#[derive(Debug, Clone, Serialize)]
struct CornerCsvRow {
    x: usize,
    y: usize,
    response: f64,
    noise: String,
    seed: u64,
    levels: Option<usize>,
    rule: Option<String>,
    harris_k: f64,
    harris_sigma: f64,
    harris_radius: usize,
    harris_threshold: f64,
    harris_threshold_mode: &'static str,
    harris_nms_radius: usize,
}

/// What a `denoise` run produced.
#[derive(Debug, Clone)]
pub struct DenoiseOutcome {
    pub noisy: GrayImage,
    pub denoised: GrayImage,
    pub stats: Vec<BandReport>,
    /// Quality of the (possibly noisy) input against the clean reference.
    pub noisy_quality: Option<QualityReport>,
    pub denoised_quality: Option<QualityReport>,
}

#[derive(Debug, Clone)]
pub struct CornersOutcome {
    pub image: GrayImage,
    pub corners: CornerSet,
}

fn emits(p: &PipelineArgs, what: Emit) -> bool {
    p.emit.as_ref().is_none_or(|e| e.contains(&what))
}

fn noise_label(p: &PipelineArgs) -> String {
    p.noise
        .map_or_else(|| "none".to_string(), |k| k.to_string())
}

fn prepare_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn check_input(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Pgm(PgmError::Missing {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
        }))
    }
}

fn write_csv<R: Serialize>(path: PathBuf, rows: &[R]) -> Result<(), CliError> {
    let file = fs::File::create(&path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    write_rows(file, rows).map_err(|source| CliError::Csv { path, source })
}

fn check_levels(img: &GrayImage, levels: usize) -> Result<(), CliError> {
    if levels == 0 || levels > max_levels(img.width(), img.height()) {
        return Err(Error::TooManyLevels {
            width: img.width(),
            height: img.height(),
            levels,
        }
        .into());
    }
    Ok(())
}

/// Loads the input and applies the optional noise.
fn load_input(p: &PipelineArgs) -> Result<(GrayImage, GrayImage), CliError> {
    check_input(&p.input)?;
    prepare_out_dir(&p.out_dir)?;
    let clean = load_pgm(&p.input)?;
    let noisy = match p.noise {
        Some(kind) => NoiseSpec::new(kind, p.seed).apply(&clean)?,
        None => clean.clone(),
    };
    Ok((clean, noisy))
}

pub fn run_denoise(args: &DenoiseArgs) -> Result<DenoiseOutcome, CliError> {
    let p = &args.pipeline;
    p.rule.validate()?;
    if let Some(r) = &args.reference {
        check_input(r)?;
    }
    let (clean, noisy) = load_input(p)?;
    check_levels(&noisy, p.levels)?;
    let reference = match (&args.reference, p.noise) {
        (Some(path), _) => Some(load_pgm(path)?),
        (None, Some(_)) => Some(clean),
        (None, None) => None,
    };

    let (denoised, stats) = denoise(&noisy, p.levels, p.rule)?;
    let (noisy_quality, denoised_quality) = match &reference {
        Some(r) => (
            Some(QualityReport::compare(r, &noisy)?),
            Some(QualityReport::compare(r, &denoised)?),
        ),
        None => (None, None),
    };

    if p.noise.is_some() {
        write_pgm(&noisy, p.out_dir.join("noisy.pgm"), !p.ascii)?;
    }
    if emits(p, Emit::Denoised) {
        write_pgm(&denoised, p.out_dir.join("denoised.pgm"), !p.ascii)?;
    }
    if emits(p, Emit::Stats) {
        let rows: Vec<StatsRow> = stats
            .iter()
            .map(|s| StatsRow {
                noise: noise_label(p),
                seed: p.seed,
                levels: p.levels,
                rule: p.rule.to_string(),
                level: s.level,
                band: s.band,
                sigma_noise: s.sigma_noise,
                sigma_w: s.sigma_w,
                sigma_s: s.sigma_s,
                lambda: s.lambda,
                zeroed: s.zeroed,
            })
            .collect();
        write_csv(p.out_dir.join("stats.csv"), &rows)?;
    }
    if args.dump_bands {
        dump_bands(&noisy, p)?;
    }
    Ok(DenoiseOutcome {
        noisy,
        denoised,
        stats,
        noisy_quality,
        denoised_quality,
    })
}

fn dump_bands(img: &GrayImage, p: &PipelineArgs) -> Result<(), CliError> {
    let pyramid = decompose(img, p.levels)?;
    let save = |name: String, band: &crate::matrix::Matrix| -> Result<(), CliError> {
        let (im, r) = band_to_image(band);
        write_pgm(&im, p.out_dir.join(&name), !p.ascii)?;
        println!("{name}: pixel = (coeff - {}) * {}", r.offset, r.scale);
        Ok(())
    };
    for (i, d) in pyramid.details.iter().enumerate() {
        for b in Band::ALL {
            save(format!("band_{}_{b}.pgm", i + 1), d.band(b))?;
        }
    }
    save(format!("band_{}_LL.pgm", pyramid.levels()), &pyramid.approx)
}

pub fn run_corners(args: &CornersArgs) -> Result<CornersOutcome, CliError> {
    let p = &args.pipeline;
    let params = args.harris.params();
    params.validate()?;
    p.rule.validate()?;
    let (_, noisy) = load_input(p)?;
    let image = if args.denoise {
        check_levels(&noisy, p.levels)?;
        denoise(&noisy, p.levels, p.rule)?.0
    } else {
        noisy
    };
    let corners = harris(&image, &params)?;

    if emits(p, Emit::Corners) {
        let hc = HarrisColumns::from(&params);
        let rows: Vec<CornerCsvRow> = corners
            .corners
            .iter()
            .map(|c| CornerCsvRow {
                x: c.x,
                y: c.y,
                response: c.response,
                noise: noise_label(p),
                seed: p.seed,
                levels: args.denoise.then_some(p.levels),
                rule: args.denoise.then(|| p.rule.to_string()),
                harris_k: hc.harris_k,
                harris_sigma: hc.harris_sigma,
                harris_radius: hc.harris_radius,
                harris_threshold: hc.harris_threshold,
                harris_threshold_mode: hc.harris_threshold_mode,
                harris_nms_radius: hc.harris_nms_radius,
            })
            .collect();
        if rows.is_empty() {
            write_corner_header(p.out_dir.join("corners.csv"))?;
        } else {
            write_csv(p.out_dir.join("corners.csv"), &rows)?;
        }
    }
    if emits(p, Emit::Annotated) {
        write_pgm(
            &annotate(&image, &corners),
            p.out_dir.join("corners.pgm"),
            !p.ascii,
        )?;
    }
    if args.denoise && emits(p, Emit::Denoised) {
        write_pgm(&image, p.out_dir.join("denoised.pgm"), !p.ascii)?;
    }
    Ok(CornersOutcome { image, corners })
}

const CORNER_HEADER: &str = "x,y,response,noise,seed,levels,rule,harris_k,harris_sigma,\
harris_radius,harris_threshold,harris_threshold_mode,harris_nms_radius\n";

fn write_corner_header(path: PathBuf) -> Result<(), CliError> {
    fs::write(&path, CORNER_HEADER).map_err(|source| CliError::Io { path, source })
}

pub fn run_bench_cmd(args: &BenchArgs) -> Result<crate::bench::BenchReport, CliError> {
    let cfg = BenchConfig {
        levels: args.levels.clone(),
        rule: args.rule,
        harris: args.harris.params(),
        seed: args.seed,
        ..BenchConfig::default()
    };
    cfg.harris.validate()?;
    check_input(&args.input)?;
    prepare_out_dir(&args.out_dir)?;
    let clean = load_pgm(&args.input)?;
    for &l in &cfg.levels {
        check_levels(&clean, l)?;
    }
    let report = run_bench(&clean, &cfg)?;
    write_csv(args.out_dir.join("bench_psnr.csv"), &report.psnr)?;
    write_csv(args.out_dir.join("bench_corners.csv"), &report.corners)?;
    Ok(report)
}

fn run_synth(args: &SynthArgs) -> Result<(), CliError> {
    let s = args.size;
    if s < 8 {
        return Err(Error::InvalidParameter(format!("size {s} is below 8")).into());
    }
    let img = match args.kind {
        SynthKind::Scene => synth::scene(s),
        SynthKind::Square => synth::white_square(s, (s * 3 / 8).max(2)),
        SynthKind::Checkerboard => synth::checkerboard(s, (s / 8).max(1)),
        SynthKind::Ramp => synth::ramp(s, s),
    };
    write_pgm(&img, &args.output, true)?;
    Ok(())
}

fn print_quality(label: &str, q: &QualityReport) {
    println!("{label:<9} PSNR {:.4} dB  MSE {:.4}", q.psnr_db, q.mse);
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    match &cli.command {
        Command::Denoise(args) => {
            let out = run_denoise(args)?;
            if let (Some(n), Some(d)) = (&out.noisy_quality, &out.denoised_quality) {
                print_quality("noisy", n);
                print_quality("denoised", d);
            }
            for s in &out.stats {
                let _ = writeln!(
                    stdout,
                    "level {} {}: sigma_noise {:.4} sigma_s {:.4} lambda {:.4} zeroed {}",
                    s.level, s.band, s.sigma_noise, s.sigma_s, s.lambda, s.zeroed
                );
            }
        }
        Command::Corners(args) => {
            let out = run_corners(args)?;
            let _ = writeln!(stdout, "corners: {}", out.corners.len());
        }
        Command::Bench(args) => {
            let report = run_bench_cmd(args)?;
            for r in &report.psnr {
                let _ = writeln!(
                    stdout,
                    "{:<22} level {}  PSNR noisy {:.4} dB  denoised {:.4} dB",
                    r.noise, r.levels, r.psnr_noisy, r.psnr_denoised
                );
            }
            for r in &report.corners {
                let _ = writeln!(
                    stdout,
                    "{:<9} {:<22} level {:>4}  corners {}",
                    format!("{:?}", r.stage).to_lowercase(),
                    r.noise,
                    r.levels.map_or_else(|| "-".into(), |l| l.to_string()),
                    r.corners
                );
            }
        }
        Command::Synth(args) => run_synth(args)?,
    }
    Ok(())
}

/// Parses arguments, runs the command and maps failures to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
