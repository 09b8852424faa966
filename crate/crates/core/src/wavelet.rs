//! Orthonormal 2D Haar wavelet transform.
//!
//! One analysis step filters rows first, then columns, mapping each sample
//! pair `(a, b)` to `((a + b) / √2, (a − b) / √2)`. Band naming:
//!
//! | band | row filter | column filter | content             |
//! |------|------------|---------------|---------------------|
//! | `ll` | low        | low           | approximation       |
//! | `lh` | low        | high          | vertical details    |
//! | `hl` | high       | low           | horizontal details  |
//! | `hh` | high       | high          | diagonal details    |
//!
//! Odd dimensions are padded by replicating the last row/column before each
//! analysis step and cropped again after synthesis. The `ll` band of a
//! constant input carries a gain of 2 per level.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::matrix::Matrix;

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Detail band orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Band {
    #[serde(rename = "LH")]
    Lh,
    #[serde(rename = "HL")]
    Hl,
    #[serde(rename = "HH")]
    Hh,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Lh, Band::Hl, Band::Hh];
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Band::Lh => "LH",
            Band::Hl => "HL",
            Band::Hh => "HH",
        })
    }
}

/// Output of one analysis step.
#[derive(Debug, Clone, PartialEq)]
pub struct Subbands {
    pub ll: Matrix,
    pub lh: Matrix,
    pub hl: Matrix,
    pub hh: Matrix,
}

/// The three detail bands of one decomposition level.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailLevel {
    pub lh: Matrix,
    pub hl: Matrix,
    pub hh: Matrix,
}

impl DetailLevel {
    pub fn band(&self, band: Band) -> &Matrix {
        match band {
            Band::Lh => &self.lh,
            Band::Hl => &self.hl,
            Band::Hh => &self.hh,
        }
    }

    pub fn band_mut(&mut self, band: Band) -> &mut Matrix {
        match band {
            Band::Lh => &mut self.lh,
            Band::Hl => &mut self.hl,
            Band::Hh => &mut self.hh,
        }
    }
}

/// Multilevel decomposition: `details[0]` is the finest level, `approx` the
/// coarsest approximation band.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid {
    pub approx: Matrix,
    pub details: Vec<DetailLevel>,
    /// `(width, height)` of the decomposed image.
    pub original_size: (usize, usize),
}

impl WaveletPyramid {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Always `3 * levels + 1`.
    pub fn band_count(&self) -> usize {
        3 * self.levels() + 1
    }

    /// Expected `(rows, cols)` of the bands at `level` (1-based); level 0 is
    /// the image itself.
    pub fn level_shape(&self, level: usize) -> (usize, usize) {
        let (w, h) = self.original_size;
        (h.div_ceil(1 << level), w.div_ceil(1 << level))
    }

    fn validate(&self) -> Result<()> {
        let n = self.levels();
        if n == 0 {
            return Err(Error::InvalidParameter("pyramid has no levels".into()));
        }
        for (i, d) in self.details.iter().enumerate() {
            let want = self.level_shape(i + 1);
            for band in Band::ALL {
                if d.band(band).shape() != want {
                    return Err(Error::DimensionMismatch(format!(
                        "level {} {band} band is {:?}, expected {want:?}",
                        i + 1,
                        d.band(band).shape()
                    )));
                }
            }
        }
        if self.approx.shape() != self.level_shape(n) {
            return Err(Error::DimensionMismatch(format!(
                "approximation band is {:?}, expected {:?}",
                self.approx.shape(),
                self.level_shape(n)
            )));
        }
        Ok(())
    }
}

/// One level of 2D Haar analysis.
pub fn dwt2_haar(m: &Matrix) -> Subbands {
    let (rows, cols) = m.shape();
    let hr = rows.div_ceil(2);
    let hc = cols.div_ceil(2);
    // Replicated padding: index 2k+1 past the end falls back to the last sample.
    let at = |r: usize, c: usize| m.get(r.min(rows - 1), c.min(cols - 1));

    // Row pass on the (virtually) padded input: 2*hr rows of hc low/high pairs.
    let mut low = Matrix::zeros(2 * hr, hc);
    let mut high = Matrix::zeros(2 * hr, hc);
    for r in 0..2 * hr {
        for k in 0..hc {
            let a = at(r, 2 * k);
            let b = at(r, 2 * k + 1);
            low.set(r, k, (a + b) * INV_SQRT2);
            high.set(r, k, (a - b) * INV_SQRT2);
        }
    }

    let column_pass = |src: &Matrix| {
        let mut lo = Matrix::zeros(hr, hc);
        let mut hi = Matrix::zeros(hr, hc);
        for k in 0..hr {
            for c in 0..hc {
                let a = src.get(2 * k, c);
                let b = src.get(2 * k + 1, c);
                lo.set(k, c, (a + b) * INV_SQRT2);
                hi.set(k, c, (a - b) * INV_SQRT2);
            }
        }
        (lo, hi)
    };
    let (ll, lh) = column_pass(&low);
    let (hl, hh) = column_pass(&high);
    Subbands { ll, lh, hl, hh }
}

/// Inverse of [`dwt2_haar`], cropped to `out_size = (rows, cols)`.
pub fn idwt2_haar(bands: &Subbands, out_size: (usize, usize)) -> Result<Matrix> {
    let shape = bands.ll.shape();
    for (name, m) in [("lh", &bands.lh), ("hl", &bands.hl), ("hh", &bands.hh)] {
        if m.shape() != shape {
            return Err(Error::DimensionMismatch(format!(
                "{name} band is {:?} but ll is {shape:?}",
                m.shape()
            )));
        }
    }
    let (rows, cols) = out_size;
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    let (hr, hc) = shape;
    if rows.div_ceil(2) != hr || cols.div_ceil(2) != hc {
        return Err(Error::DimensionMismatch(format!(
            "{hr}x{hc} bands cannot reconstruct a {rows}x{cols} matrix"
        )));
    }

    let column_synth = |lo: &Matrix, hi: &Matrix| {
        let mut out = Matrix::zeros(2 * hr, hc);
        for k in 0..hr {
            for c in 0..hc {
                let l = lo.get(k, c);
                let h = hi.get(k, c);
                out.set(2 * k, c, (l + h) * INV_SQRT2);
                out.set(2 * k + 1, c, (l - h) * INV_SQRT2);
            }
        }
        out
    };
    let low = column_synth(&bands.ll, &bands.lh);
    let high = column_synth(&bands.hl, &bands.hh);

    let mut out = Matrix::zeros(rows, cols);
    for r in 0..rows {
        for k in 0..hc {
            let l = low.get(r, k);
            let h = high.get(r, k);
            out.set(r, 2 * k, (l + h) * INV_SQRT2);
            if 2 * k + 1 < cols {
                out.set(r, 2 * k + 1, (l - h) * INV_SQRT2);
            }
        }
    }
    Ok(out)
}

/// Largest level count accepted by [`decompose`] for a `width x height` image.
pub fn max_levels(width: usize, height: usize) -> usize {
    let m = width.min(height);
    if m == 0 {
        0
    } else {
        m.ilog2() as usize
    }
}

/// `levels`-deep Haar pyramid. Requires `min(width, height) >= 2^levels`.
pub fn decompose(img: &GrayImage, levels: usize) -> Result<WaveletPyramid> {
    decompose_matrix(&img.to_matrix(), levels)
}

pub fn decompose_matrix(m: &Matrix, levels: usize) -> Result<WaveletPyramid> {
    let (rows, cols) = m.shape();
    if levels == 0 || levels > max_levels(cols, rows) {
        return Err(Error::TooManyLevels {
            width: cols,
            height: rows,
            levels,
        });
    }
    let mut details = Vec::with_capacity(levels);
    let mut current = m.clone();
    for _ in 0..levels {
        let Subbands { ll, lh, hl, hh } = dwt2_haar(&current);
        details.push(DetailLevel { lh, hl, hh });
        current = ll;
    }
    Ok(WaveletPyramid {
        approx: current,
        details,
        original_size: (cols, rows),
    })
}

/// Synthesis without clipping.
pub fn reconstruct_matrix(p: &WaveletPyramid) -> Result<Matrix> {
    p.validate()?;
    let mut current = p.approx.clone();
    for level in (1..=p.levels()).rev() {
        let d = &p.details[level - 1];
        let bands = Subbands {
            ll: current,
            lh: d.lh.clone(),
            hl: d.hl.clone(),
            hh: d.hh.clone(),
        };
        current = idwt2_haar(&bands, p.level_shape(level - 1))?;
    }
    Ok(current)
}

/// Synthesis followed by clipping to `[0, 255]`.
pub fn reconstruct(p: &WaveletPyramid) -> Result<GrayImage> {
    Ok(GrayImage::from_matrix_clipped(&reconstruct_matrix(p)?))
}

/// Affine map applied by [`band_to_image`]: `pixel = (coeff - offset) * scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rescale {
    pub offset: f64,
    pub scale: f64,
}

/// Stretches a band's range onto `[0, 255]` for visual inspection.
pub fn band_to_image(band: &Matrix) -> (GrayImage, Rescale) {
    let (lo, hi) = band
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let scale = if hi > lo { 255.0 / (hi - lo) } else { 0.0 };
    let rescale = Rescale { offset: lo, scale };
    let img = GrayImage::from_fn(band.cols(), band.rows(), |x, y| {
        (band.get(y, x) - lo) * scale
    });
    (img, rescale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Orthonormal Haar analysis written out as a 4x4 matrix acting on
    /// `[a, b, c, d]` = `[[a, b], [c, d]]` flattened row-major. Rows give
    /// `ll`, `lh`, `hl`, `hh`.
    fn haar_2x2_oracle(m: [[f64; 2]; 2]) -> [f64; 4] {
        const W: [[f64; 4]; 4] = [
            [0.5, 0.5, 0.5, 0.5],
            [0.5, 0.5, -0.5, -0.5],
            [0.5, -0.5, 0.5, -0.5],
            [0.5, -0.5, -0.5, 0.5],
        ];
        let x = [m[0][0], m[0][1], m[1][0], m[1][1]];
        let mut out = [0.0; 4];
        for (o, row) in out.iter_mut().zip(W) {
            *o = row.iter().zip(x).map(|(w, v)| w * v).sum();
        }
        out
    }

    #[test]
    fn hand_example() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        let s = dwt2_haar(&m);
        let o = haar_2x2_oracle([[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(o, [5.0, -2.0, -1.0, 0.0]);
        assert!((s.ll.get(0, 0) - 5.0).abs() < 1e-12);
        assert!((s.lh.get(0, 0) + 2.0).abs() < 1e-12);
        assert!((s.hl.get(0, 0) + 1.0).abs() < 1e-12);
        assert!(s.hh.get(0, 0).abs() < 1e-12);
        let back = idwt2_haar(&s, (2, 2)).unwrap();
        assert!(back.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn constant_has_no_detail() {
        let c = 37.0;
        let s = dwt2_haar(&Matrix::filled(2, 2, c));
        assert!((s.ll.get(0, 0) - 2.0 * c).abs() < 1e-12);
        for b in [&s.lh, &s.hl, &s.hh] {
            assert!(b.get(0, 0).abs() < 1e-12);
        }
        let back = idwt2_haar(&s, (2, 2)).unwrap();
        assert!(back.max_abs_diff(&Matrix::filled(2, 2, c)) < 1e-12);
    }

    #[test]
    fn odd_shapes_round_trip() {
        let m = Matrix::from_fn(7, 5, |r, c| ((r * 31 + c * 17) % 23) as f64 - 4.5);
        let s = dwt2_haar(&m);
        assert_eq!(s.ll.shape(), (4, 3));
        let back = idwt2_haar(&s, (7, 5)).unwrap();
        assert!(back.max_abs_diff(&m) < 1e-9);
        let single = Matrix::from_rows(&[[9.0]]);
        let back = idwt2_haar(&dwt2_haar(&single), (1, 1)).unwrap();
        assert!((back.get(0, 0) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn idwt_rejects_mismatched_bands() {
        let mut s = dwt2_haar(&Matrix::filled(4, 4, 1.0));
        assert!(idwt2_haar(&s, (6, 4)).is_err());
        s.hh = Matrix::zeros(1, 2);
        assert!(matches!(
            idwt2_haar(&s, (4, 4)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn pyramid_of_constant() {
        let img = GrayImage::filled(4, 4, 100.0);
        let p = decompose(&img, 2).unwrap();
        assert_eq!(p.band_count(), 7);
        assert_eq!(p.approx.shape(), (1, 1));
        assert!((p.approx.get(0, 0) - 400.0).abs() < 1e-9);
        for d in &p.details {
            for b in Band::ALL {
                assert!(d.band(b).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pyramid_band_shapes() {
        let img = GrayImage::filled(512, 512, 1.0);
        let p = decompose(&img, 2).unwrap();
        assert_eq!(p.details[0].hh.shape(), (256, 256));
        assert_eq!(p.details[1].hh.shape(), (128, 128));
        let img = GrayImage::filled(13, 9, 1.0);
        let p = decompose(&img, 3).unwrap();
        assert_eq!(p.details[0].lh.shape(), (5, 7));
        assert_eq!(p.details[1].lh.shape(), (3, 4));
        assert_eq!(p.details[2].lh.shape(), (2, 2));
        assert_eq!(p.approx.shape(), (2, 2));
    }

    #[test]
    fn single_level_wraps_dwt() {
        let img = GrayImage::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let p = decompose(&img, 1).unwrap();
        let s = dwt2_haar(&img.to_matrix());
        assert_eq!(p.approx, s.ll);
        assert_eq!(p.details[0].lh, s.lh);
    }

    #[test]
    fn level_limits() {
        let img = GrayImage::filled(64, 64, 0.0);
        assert!(decompose(&img, 6).is_ok());
        assert!(matches!(
            decompose(&img, 7),
            Err(Error::TooManyLevels { .. })
        ));
        assert!(decompose(&img, 99).is_err());
        assert!(decompose(&img, 0).is_err());
    }

    #[test]
    fn reconstruct_rejects_inconsistent_pyramid() {
        let img = GrayImage::filled(8, 8, 3.0);
        let mut p = decompose(&img, 2).unwrap();
        p.details[1].hl = Matrix::zeros(3, 3);
        assert!(reconstruct(&p).is_err());
    }

    #[test]
    fn zeroed_details_of_constant() {
        let img = GrayImage::filled(10, 6, 80.0);
        let mut p = decompose(&img, 1).unwrap();
        for b in Band::ALL {
            let m = p.details[0].band_mut(b);
            *m = Matrix::zeros(m.rows(), m.cols());
        }
        let out = reconstruct(&p).unwrap();
        assert!(out.pixels().iter().all(|v| (v - 80.0).abs() < 1e-9));
    }

    #[test]
    fn band_dump_rescale() {
        let band = Matrix::from_rows(&[[-2.0, 0.0], [2.0, 6.0]]);
        let (img, r) = band_to_image(&band);
        assert_eq!(r.offset, -2.0);
        assert_eq!(img.pixels(), &[0.0, 63.75, 127.5, 255.0]);
        let (flat, r) = band_to_image(&Matrix::filled(2, 2, 4.0));
        assert_eq!(r.scale, 0.0);
        assert!(flat.pixels().iter().all(|&v| v == 0.0));
    }

    fn small_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..10, 1usize..10).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-100.0f64..100.0, r * c)
                .prop_map(move |v| Matrix::new(r, c, v).unwrap())
        })
    }

    proptest! {
        #[test]
        fn linearity(
            (x, y) in (1usize..9, 1usize..9).prop_flat_map(|(r, c)| (
                proptest::collection::vec(-50.0f64..50.0, r * c).prop_map(move |v| Matrix::new(r, c, v).unwrap()),
                proptest::collection::vec(-50.0f64..50.0, r * c).prop_map(move |v| Matrix::new(r, c, v).unwrap()),
            )),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
        ) {
            let combo = Matrix::from_fn(x.rows(), x.cols(), |r, c| a * x.get(r, c) + b * y.get(r, c));
            let sx = dwt2_haar(&x);
            let sy = dwt2_haar(&y);
            let sc = dwt2_haar(&combo);
            for (bx, by, bc) in [
                (&sx.ll, &sy.ll, &sc.ll),
                (&sx.lh, &sy.lh, &sc.lh),
                (&sx.hl, &sy.hl, &sc.hl),
                (&sx.hh, &sy.hh, &sc.hh),
            ] {
                let lin = Matrix::from_fn(bx.rows(), bx.cols(), |r, c| a * bx.get(r, c) + b * by.get(r, c));
                prop_assert!(lin.max_abs_diff(bc) < 1e-9);
            }
        }

        #[test]
        fn single_step_round_trip(m in small_matrix()) {
            let back = idwt2_haar(&dwt2_haar(&m), m.shape()).unwrap();
            prop_assert!(back.max_abs_diff(&m) < 1e-9);
        }
    }
}
