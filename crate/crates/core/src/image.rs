//! Grayscale rasters and PGM (Netpbm P2/P5) I/O.
//!
//! Intensities are stored as `f64` in `[0, 255]` so that processed images keep
//! sub-integer precision; quantization to 8-bit samples happens only when an
//! image is written. Noise parameters elsewhere in the crate are expressed in
//! unit scale, see [`to_unit`] and [`from_unit`].

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, PgmError, Result};
use crate::matrix::Matrix;

/// Largest representable intensity.
pub const PEAK: f64 = 255.0;

/// Row-major grayscale image with intensities in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        if let Some((i, v)) = pixels
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=PEAK).contains(*v))
        {
            return Err(Error::InvalidImage(format!(
                "pixel {i} has intensity {v} outside [0, 255]"
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image by evaluating `f(x, y)` and clipping the result.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(clip(f(x, y)));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    /// Image from a matrix (rows = height), clipping every entry to `[0, 255]`.
    pub fn from_matrix_clipped(m: &Matrix) -> Self {
        Self {
            width: m.cols(),
            height: m.rows(),
            pixels: m.values().iter().map(|&v| clip(v)).collect(),
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::new(self.height, self.width, self.pixels.clone()).expect("valid image")
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    /// Copy with every intensity rounded half away from zero.
    pub fn rounded(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|v| v.round()).collect(),
        }
    }

    /// 8-bit samples as written by [`write_pgm`].
    pub fn to_bytes(&self) -> Vec<u8> {
        self.pixels.iter().map(|&v| quantize(v)).collect()
    }
}

/// Clips to `[0, 255]`. NaN maps to 0.
#[inline]
pub fn clip(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, PEAK)
    }
}

#[inline]
fn quantize(v: f64) -> u8 {
    // f64::round is half-away-from-zero.
    clip(v).round() as u8
}

/// Rescales intensities to `[0, 1]`. The returned matrix has `height` rows.
pub fn to_unit(img: &GrayImage) -> Matrix {
    Matrix::new(
        img.height,
        img.width,
        img.pixels.iter().map(|v| v / PEAK).collect(),
    )
    .expect("valid image")
}

/// Inverse of [`to_unit`]: multiplies by 255 and clips.
pub fn from_unit(raster: &Matrix) -> GrayImage {
    GrayImage {
        width: raster.cols(),
        height: raster.rows(),
        pixels: raster.values().iter().map(|v| clip(v * PEAK)).collect(),
    }
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage, PgmError> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|source| PgmError::Missing {
        path: path.to_path_buf(),
        source,
    })?;
    decode_pgm(&data)
}

pub fn write_pgm(img: &GrayImage, path: impl AsRef<Path>, binary: bool) -> Result<(), PgmError> {
    let path = path.as_ref();
    let mut file = fs::File::create(path).map_err(|source| PgmError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(&encode_pgm(img, binary))
        .map_err(|source| PgmError::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Serializes to P5 (`binary`) or P2 bytes.
pub fn encode_pgm(img: &GrayImage, binary: bool) -> Vec<u8> {
    let magic = if binary { "P5" } else { "P2" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width, img.height).into_bytes();
    let samples = img.to_bytes();
    if binary {
        out.extend_from_slice(&samples);
        return out;
    }
    // Netpbm asks for plain-format lines of at most 70 characters.
    for row in samples.chunks(img.width) {
        let mut line = String::new();
        for s in row {
            let tok = s.to_string();
            if !line.is_empty() && line.len() + 1 + tok.len() > 70 {
                out.extend_from_slice(line.as_bytes());
                out.push(b'\n');
                line.clear();
            }
            if !line.is_empty() {
                line.push(' ');
            }
            line.push_str(&tok);
        }
        out.extend_from_slice(line.as_bytes());
        out.push(b'\n');
    }
    out
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&[u8]> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self
            .data
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.data[start..self.pos])
    }

    fn header_number(&mut self, what: &str) -> Result<u32, PgmError> {
        let tok = self
            .token()
            .ok_or_else(|| PgmError::MalformedHeader(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| {
                PgmError::MalformedHeader(format!(
                    "{what} is not a number: {:?}",
                    String::from_utf8_lossy(tok)
                ))
            })
    }
}

/// Parses P2 or P5 bytes.
pub fn decode_pgm(data: &[u8]) -> Result<GrayImage, PgmError> {
    let binary = match data.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => {
            return Err(PgmError::MalformedHeader(
                "magic must be P2 or P5".to_string(),
            ))
        }
    };
    let mut cur = Cursor { data, pos: 2 };
    if !cur
        .data
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(PgmError::MalformedHeader(
            "expected whitespace after magic".to_string(),
        ));
    }
    let width = cur.header_number("width")? as usize;
    let height = cur.header_number("height")? as usize;
    let maxval = cur.header_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::MalformedHeader(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    if maxval == 0 {
        return Err(PgmError::MalformedHeader("maxval must be positive".into()));
    }
    if maxval > 255 {
        return Err(PgmError::MaxvalTooLarge(maxval));
    }
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| PgmError::MalformedHeader("image dimensions overflow".into()))?;

    let mut pixels = Vec::with_capacity(expected);
    if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        match cur.data.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => {
                return Err(PgmError::MalformedHeader(
                    "expected whitespace after maxval".into(),
                ))
            }
        }
        let raster = &cur.data[cur.pos..];
        if raster.len() < expected {
            return Err(PgmError::Truncated {
                expected,
                found: raster.len(),
            });
        }
        for &b in &raster[..expected] {
            if u32::from(b) > maxval {
                return Err(PgmError::InvalidSample(format!(
                    "sample {b} exceeds maxval {maxval}"
                )));
            }
            pixels.push(f64::from(b));
        }
    } else {
        while pixels.len() < expected {
            let Some(tok) = cur.token() else {
                return Err(PgmError::Truncated {
                    expected,
                    found: pixels.len(),
                });
            };
            let v = std::str::from_utf8(tok)
                .ok()
                .and_then(|s| s.parse::<u32>().ok())
                .ok_or_else(|| {
                    PgmError::InvalidSample(format!("{:?}", String::from_utf8_lossy(tok)))
                })?;
            if v > maxval {
                return Err(PgmError::InvalidSample(format!(
                    "sample {v} exceeds maxval {maxval}"
                )));
            }
            pixels.push(f64::from(v));
        }
    }
    Ok(GrayImage {
        width,
        height,
        pixels,
    })
}
