//! Harris corner detector.
//!
//! Gradients use the central difference `[-1, 0, 1]` with replicated edges.
//! The structure tensor entries `A = Σ w·Ix²`, `B = Σ w·Ix·Iy`,
//! `C = Σ w·Iy²` are sums over a circular Gaussian window whose weights are
//! normalized to one. The response is `det − k·trace²`; corners are strict
//! local maxima of the response inside the non-border region.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::matrix::Matrix;

/// How the minimum accepted response is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CornerThreshold {
    /// Fraction of the largest response in the image, in `(0, 1)`.
    Relative(f64),
    /// Fixed response value.
    Absolute(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarrisParams {
    pub k: f64,
    pub window_sigma: f64,
    pub window_radius: usize,
    pub threshold: CornerThreshold,
    pub nms_radius: usize,
}

impl Default for HarrisParams {
    fn default() -> Self {
        Self {
            k: 0.04,
            window_sigma: 1.0,
            window_radius: 3,
            threshold: CornerThreshold::Relative(0.01),
            nms_radius: 1,
        }
    }
}

impl HarrisParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.k > 0.0 && self.k.is_finite()) {
            return bad(format!("harris k must be positive, got {}", self.k));
        }
        if !(self.window_sigma > 0.0 && self.window_sigma.is_finite()) {
            return bad(format!(
                "window sigma must be positive, got {}",
                self.window_sigma
            ));
        }
        if self.window_radius < 1 {
            return bad("window radius must be at least 1".into());
        }
        if self.nms_radius < 1 {
            return bad("nms radius must be at least 1".into());
        }
        match self.threshold {
            CornerThreshold::Relative(f) if !(f > 0.0 && f < 1.0) => {
                bad(format!("relative threshold must lie in (0, 1), got {f}"))
            }
            CornerThreshold::Absolute(t) if !t.is_finite() => {
                bad(format!("absolute threshold must be finite, got {t}"))
            }
            _ => Ok(()),
        }
    }

    /// Normalized 1D Gaussian taps for offsets `-radius..=radius`.
    pub fn window_taps(&self) -> Vec<f64> {
        let r = self.window_radius as isize;
        let two_s2 = 2.0 * self.window_sigma * self.window_sigma;
        let raw: Vec<f64> = (-r..=r)
            .map(|i| (-((i * i) as f64) / two_s2).exp())
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Corner {
    /// Column.
    pub x: usize,
    /// Row.
    pub y: usize,
    pub response: f64,
}

/// Detected corners ordered by descending response, then row, then column.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CornerSet {
    pub corners: Vec<Corner>,
}

impl CornerSet {
    pub fn len(&self) -> usize {
        self.corners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }

    pub fn positions(&self) -> Vec<(usize, usize)> {
        self.corners.iter().map(|c| (c.x, c.y)).collect()
    }
}

/// Per-pixel structure tensor entries.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTensor {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
}

/// Central-difference gradients `(ix, iy)`; needs at least a 3x3 image.
pub fn gradients(img: &GrayImage) -> Result<(Matrix, Matrix)> {
    let (w, h) = (img.width(), img.height());
    if w < 3 || h < 3 {
        return Err(Error::ImageTooSmall(format!(
            "gradients need at least 3x3 pixels, got {w}x{h}"
        )));
    }
    let m = img.to_matrix();
    let ix = Matrix::from_fn(h, w, |r, c| {
        let (r, c) = (r as isize, c as isize);
        m.get_clamped(r, c + 1) - m.get_clamped(r, c - 1)
    });
    let iy = Matrix::from_fn(h, w, |r, c| {
        let (r, c) = (r as isize, c as isize);
        m.get_clamped(r + 1, c) - m.get_clamped(r - 1, c)
    });
    Ok((ix, iy))
}

/// Separable convolution with replicated edges: rows, then columns.
fn smooth(src: &Matrix, taps: &[f64]) -> Matrix {
    let r = (taps.len() / 2) as isize;
    let (rows, cols) = src.shape();
    let horizontal = Matrix::from_fn(rows, cols, |y, x| {
        taps.iter()
            .enumerate()
            .map(|(i, w)| w * src.get_clamped(y as isize, x as isize + i as isize - r))
            .sum()
    });
    Matrix::from_fn(rows, cols, |y, x| {
        taps.iter()
            .enumerate()
            .map(|(i, w)| w * horizontal.get_clamped(y as isize + i as isize - r, x as isize))
            .sum()
    })
}

pub fn structure_tensor(
    ix: &Matrix,
    iy: &Matrix,
    params: &HarrisParams,
) -> Result<StructureTensor> {
    if ix.shape() != iy.shape() {
        return Err(Error::DimensionMismatch(format!(
            "ix is {:?} but iy is {:?}",
            ix.shape(),
            iy.shape()
        )));
    }
    params.validate()?;
    let taps = params.window_taps();
    let (rows, cols) = ix.shape();
    let xx = Matrix::from_fn(rows, cols, |r, c| ix.get(r, c) * ix.get(r, c));
    let xy = Matrix::from_fn(rows, cols, |r, c| ix.get(r, c) * iy.get(r, c));
    let yy = Matrix::from_fn(rows, cols, |r, c| iy.get(r, c) * iy.get(r, c));
    Ok(StructureTensor {
        a: smooth(&xx, &taps),
        b: smooth(&xy, &taps),
        c: smooth(&yy, &taps),
    })
}

/// `H = (A·C − B²) − k·(A + C)²`.
#[inline]
pub fn response(a: f64, b: f64, c: f64, k: f64) -> f64 {
    let trace = a + c;
    (a * c - b * b) - k * trace * trace
}

pub fn corner_response(t: &StructureTensor, params: &HarrisParams) -> Result<Matrix> {
    let shape = t.a.shape();
    if t.b.shape() != shape || t.c.shape() != shape {
        return Err(Error::DimensionMismatch(
            "structure tensor components differ in shape".into(),
        ));
    }
    let k = params.k;
    Ok(Matrix::from_fn(shape.0, shape.1, |r, c| {
        response(t.a.get(r, c), t.b.get(r, c), t.c.get(r, c), k)
    }))
}

/// Relative difference below which two responses are treated as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[inline]
fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs())
}

/// Thresholded, non-maximum-suppressed local maxima of a response map.
///
/// Ties inside a neighborhood go to the pixel that comes first in row-major
/// order. Two responses count as tied when they agree to within
/// [`TIE_TOLERANCE`] relative, so plateaus that are flat in exact arithmetic
/// resolve the same way regardless of summation order. Pixels closer than
/// `window_radius` to the border are never reported.
pub fn detect_corners(h: &Matrix, params: &HarrisParams) -> Result<CornerSet> {
    params.validate()?;
    let (rows, cols) = h.shape();
    let max = h.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = match params.threshold {
        CornerThreshold::Relative(f) => f * max,
        CornerThreshold::Absolute(t) => t,
    };
    let border = params.window_radius;
    let nr = params.nms_radius;
    let mut corners = Vec::new();
    if rows <= 2 * border || cols <= 2 * border {
        return Ok(CornerSet { corners });
    }
    for y in border..rows - border {
        for x in border..cols - border {
            let v = h.get(y, x);
            if !(v > 0.0 && v > floor) {
                continue;
            }
            let mut is_max = true;
            'scan: for yy in y.saturating_sub(nr)..=(y + nr).min(rows - 1) {
                for xx in x.saturating_sub(nr)..=(x + nr).min(cols - 1) {
                    if (yy, xx) == (y, x) {
                        continue;
                    }
                    let q = h.get(yy, xx);
                    let earlier = (yy, xx) < (y, x);
                    let tied = ties(q, v);
                    if (q > v && !tied) || (earlier && tied) {
                        is_max = false;
                        break 'scan;
                    }
                }
            }
            if is_max {
                corners.push(Corner { x, y, response: v });
            }
        }
    }
    corners.sort_by(|p, q| {
        q.response
            .total_cmp(&p.response)
            .then((p.y, p.x).cmp(&(q.y, q.x)))
    });
    Ok(CornerSet { corners })
}

/// Full detector: gradients, tensor, response, local maxima.
pub fn harris(img: &GrayImage, params: &HarrisParams) -> Result<CornerSet> {
    Ok(harris_with_response(img, params)?.0)
}

/// Like [`harris`], also returning the response map.
pub fn harris_with_response(img: &GrayImage, params: &HarrisParams) -> Result<(CornerSet, Matrix)> {
    params.validate()?;
    let (ix, iy) = gradients(img)?;
    let tensor = structure_tensor(&ix, &iy, params)?;
    let h = corner_response(&tensor, params)?;
    Ok((detect_corners(&h, params)?, h))
}

/// Copy of `img` with each corner marked by a white plus sign spanning 3x3.
pub fn annotate(img: &GrayImage, corners: &CornerSet) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let mut px = img.pixels().to_vec();
    for c in &corners.corners {
        let (x, y) = (c.x as isize, c.y as isize);
        for (dx, dy) in [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)] {
            let (cx, cy) = (x + dx, y + dy);
            if cx >= 0 && cy >= 0 && (cx as usize) < w && (cy as usize) < h {
                px[cy as usize * w + cx as usize] = 255.0;
            }
        }
    }
    GrayImage::new(w, h, px).expect("annotation keeps image valid")
}
