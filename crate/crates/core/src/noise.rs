//! Seeded synthetic noise.
//!
//! All parameters are in unit scale: a Gaussian variance of `0.01` means a
//! standard deviation of `0.1 * 255` intensity levels.
//!
//! Randomness comes from [`ChaCha8Rng`] seeded with [`SeedableRng::seed_from_u64`].
//! Pixels are visited in row-major order and every pixel consumes a fixed
//! number of `u64` draws from the stream ([`NoiseKind::draws_per_pixel`]), so
//! pixel `i` always reads the same stream position regardless of how the
//! image is traversed. Gaussian variates use the cosine branch of Box–Muller.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image::{from_unit, to_unit, GrayImage, PEAK};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    /// Additive i.i.d. normal noise.
    Gaussian { mean: f64, variance: f64 },
    /// Multiplicative noise `I + n*I`, `n` uniform with mean 0 and the given variance.
    Speckle { variance: f64 },
    /// Impulses: each pixel is replaced by 0 or 255 with probability `density`.
    SaltPepper { density: f64 },
}

impl NoiseKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseKind::Gaussian { mean, variance } => {
                if !mean.is_finite() {
                    return Err(Error::InvalidParameter(format!("gaussian mean {mean}")));
                }
                check_variance(variance)
            }
            NoiseKind::Speckle { variance } => check_variance(variance),
            NoiseKind::SaltPepper { density } => {
                if (0.0..=1.0).contains(&density) {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "salt & pepper density {density} outside [0, 1]"
                    )))
                }
            }
        }
    }

    /// Number of `u64` words consumed from the generator per pixel.
    pub fn draws_per_pixel(&self) -> u64 {
        match self {
            NoiseKind::Gaussian { .. } => 2,
            NoiseKind::Speckle { .. } => 1,
            NoiseKind::SaltPepper { .. } => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::Gaussian { .. } => "gaussian",
            NoiseKind::Speckle { .. } => "speckle",
            NoiseKind::SaltPepper { .. } => "salt-pepper",
        }
    }
}

fn check_variance(variance: f64) -> Result<()> {
    if variance >= 0.0 && variance.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "noise variance {variance} must be a finite non-negative number"
        )))
    }
}

/// `kind:params` as accepted on the command line, e.g. `gaussian:0:0.01`,
/// `speckle:0.04`, `salt-pepper:0.05`.
impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseKind::Gaussian { mean, variance } => write!(f, "gaussian:{mean}:{variance}"),
            NoiseKind::Speckle { variance } => write!(f, "speckle:{variance}"),
            NoiseKind::SaltPepper { density } => write!(f, "salt-pepper:{density}"),
        }
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default().to_ascii_lowercase();
        let nums = parts
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad number {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let parsed = match (kind.as_str(), nums.as_slice()) {
            ("gaussian", []) => NoiseKind::Gaussian {
                mean: 0.0,
                variance: 0.01,
            },
            ("gaussian", [variance]) => NoiseKind::Gaussian {
                mean: 0.0,
                variance: *variance,
            },
            ("gaussian", [mean, variance]) => NoiseKind::Gaussian {
                mean: *mean,
                variance: *variance,
            },
            ("speckle", []) => NoiseKind::Speckle { variance: 0.04 },
            ("speckle", [variance]) => NoiseKind::Speckle {
                variance: *variance,
            },
            ("salt-pepper" | "salt_pepper" | "saltpepper" | "sp", []) => {
                NoiseKind::SaltPepper { density: 0.05 }
            }
            ("salt-pepper" | "salt_pepper" | "saltpepper" | "sp", [density]) => {
                NoiseKind::SaltPepper { density: *density }
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unrecognized noise spec {s:?}; expected gaussian:MEAN:VAR, speckle:VAR or salt-pepper:DENSITY"
                )))
            }
        };
        parsed.validate()?;
        Ok(parsed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    pub fn apply(&self, img: &GrayImage) -> Result<GrayImage> {
        match self.kind {
            NoiseKind::Gaussian { mean, variance } => add_gaussian(img, mean, variance, self.seed),
            NoiseKind::Speckle { variance } => add_speckle(img, variance, self.seed),
            NoiseKind::SaltPepper { density } => add_salt_pepper(img, density, self.seed),
        }
    }
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    rng.random::<f64>()
}

/// Standard normal variate from two uniform draws.
fn box_muller(rng: &mut ChaCha8Rng) -> f64 {
    // 1 - u lies in (0, 1], keeping ln finite.
    let u1 = 1.0 - unit_f64(rng);
    let u2 = unit_f64(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn add_gaussian(img: &GrayImage, mean: f64, variance: f64, seed: u64) -> Result<GrayImage> {
    NoiseKind::Gaussian { mean, variance }.validate()?;
    let sd = variance.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = to_unit(img);
    for v in unit.values_mut() {
        *v += mean + sd * box_muller(&mut rng);
    }
    Ok(from_unit(&unit))
}

pub fn add_speckle(img: &GrayImage, variance: f64, seed: u64) -> Result<GrayImage> {
    NoiseKind::Speckle { variance }.validate()?;
    // Uniform on [-a, a] has variance a^2 / 3.
    let half_width = (3.0 * variance).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = to_unit(img);
    for v in unit.values_mut() {
        let n = (2.0 * unit_f64(&mut rng) - 1.0) * half_width;
        *v += n * *v;
    }
    Ok(from_unit(&unit))
}

pub fn add_salt_pepper(img: &GrayImage, density: f64, seed: u64) -> Result<GrayImage> {
    NoiseKind::SaltPepper { density }.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pixels = img
        .pixels()
        .iter()
        .map(|&v| {
            let hit = unit_f64(&mut rng) < density;
            let salt = unit_f64(&mut rng) < 0.5;
            match (hit, salt) {
                (false, _) => v,
                (true, true) => PEAK,
                (true, false) => 0.0,
            }
        })
        .collect();
    GrayImage::new(img.width(), img.height(), pixels)
}
