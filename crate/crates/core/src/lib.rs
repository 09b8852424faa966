//! Grayscale image denoising by multilevel Haar wavelet shrinkage
//! (BayesShrink soft thresholding) followed by Harris corner detection.
//!
//! The typical pipeline is
//!
//! ```
//! use wavecorner::{harris, noise, shrink, synth, metrics};
//!
//! let clean = synth::scene(64);
//! let noisy = noise::add_gaussian(&clean, 0.0, 0.01, 42).unwrap();
//! let (denoised, _stats) = shrink::denoise(&noisy, 2, shrink::ThresholdRule::BayesSoft).unwrap();
//! let corners = harris::harris(&denoised, &harris::HarrisParams::default()).unwrap();
//! assert!(metrics::psnr(&clean, &denoised).unwrap() > metrics::psnr(&clean, &noisy).unwrap());
//! # let _ = corners;
//! ```

pub mod bench;
pub mod cli;
pub mod error;
pub mod harris;
pub mod image;
pub mod matrix;
pub mod metrics;
pub mod noise;
pub mod shrink;
pub mod synth;
pub mod wavelet;

pub use error::{Error, PgmError, Result};
pub use harris::{Corner, CornerSet, HarrisParams};
pub use image::GrayImage;
pub use matrix::Matrix;
pub use metrics::QualityReport;
pub use noise::{NoiseKind, NoiseSpec};
pub use shrink::{BandReport, SubbandStats, ThresholdRule};
pub use wavelet::WaveletPyramid;
