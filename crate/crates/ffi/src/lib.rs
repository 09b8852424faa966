//! C ABI for `wavecorner`.
//!
//! Images and corner sets are opaque handles created and destroyed by this
//! library. Every fallible call returns a [`WcStatus`]; on failure a message
//! describing the error is available from [`wc_last_error_message`] on the
//! same thread until the next failing call.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use wavecorner::harris::{harris, CornerThreshold};
use wavecorner::image::{load_pgm, write_pgm};
use wavecorner::metrics::{mse, psnr};
use wavecorner::noise::{add_gaussian, add_salt_pepper, add_speckle};
use wavecorner::shrink::denoise;
use wavecorner::{CornerSet, Error, GrayImage, HarrisParams, PgmError, ThresholdRule};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Io = 4,
    Format = 5,
    Panic = 6,
}

/// Grayscale image with samples in `[0, 255]`.
pub struct WcImage(GrayImage);

/// Corners ordered by descending response.
pub struct WcCornerSet(CornerSet);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WcCorner {
    /// Column.
    pub x: usize,
    /// Row.
    pub y: usize,
    pub response: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WcRule {
    Hard = 0,
    Soft = 1,
    BayesSoft = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WcHarrisParams {
    pub k: f64,
    pub window_sigma: f64,
    pub window_radius: usize,
    /// Fraction of the maximum response, or an absolute response when
    /// `threshold_is_absolute` is set.
    pub threshold: f64,
    pub threshold_is_absolute: bool,
    pub nms_radius: usize,
}

impl From<HarrisParams> for WcHarrisParams {
    fn from(p: HarrisParams) -> Self {
        let (threshold, threshold_is_absolute) = match p.threshold {
            CornerThreshold::Relative(t) => (t, false),
            CornerThreshold::Absolute(t) => (t, true),
        };
        Self {
            k: p.k,
            window_sigma: p.window_sigma,
            window_radius: p.window_radius,
            threshold,
            threshold_is_absolute,
            nms_radius: p.nms_radius,
        }
    }
}

impl From<WcHarrisParams> for HarrisParams {
    fn from(p: WcHarrisParams) -> Self {
        Self {
            k: p.k,
            window_sigma: p.window_sigma,
            window_radius: p.window_radius,
            threshold: if p.threshold_is_absolute {
                CornerThreshold::Absolute(p.threshold)
            } else {
                CornerThreshold::Relative(p.threshold)
            },
            nms_radius: p.nms_radius,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(WcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::DimensionMismatch(_) => WcStatus::DimensionMismatch,
            _ => WcStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<PgmError> for Failure {
    fn from(e: PgmError) -> Self {
        let status = match e {
            PgmError::Missing { .. } | PgmError::Io { .. } => WcStatus::Io,
            _ => WcStatus::Format,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(WcStatus::NullPointer, format!("{what} is null"))
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            WcStatus::Panic
        }
    }
}

unsafe fn image<'a>(p: *const WcImage, what: &str) -> Result<&'a GrayImage, Failure> {
    p.as_ref().map(|h| &h.0).ok_or_else(|| null(what))
}

unsafe fn to_path(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(WcStatus::InvalidArgument, "path is not UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn emit_image(out: *mut *mut WcImage, img: Result<GrayImage, Error>) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = ptr::null_mut();
    emit(out, WcImage(img?))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn wc_status_str(status: WcStatus) -> *const c_char {
    let s: &'static CStr = match status {
        WcStatus::Ok => c"ok",
        WcStatus::NullPointer => c"null pointer",
        WcStatus::InvalidArgument => c"invalid argument",
        WcStatus::DimensionMismatch => c"dimension mismatch",
        WcStatus::Io => c"i/o error",
        WcStatus::Format => c"malformed PGM",
        WcStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Message of the last failure on this thread, or null if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates an image from `width * height` row-major samples.
#[no_mangle]
pub unsafe extern "C" fn wc_image_new(
    width: usize,
    height: usize,
    pixels: *const f64,
    out: *mut *mut WcImage,
) -> WcStatus {
    guard(|| {
        if pixels.is_null() {
            return Err(null("pixels"));
        }
        let n = width
            .checked_mul(height)
            .ok_or_else(|| Failure(WcStatus::InvalidArgument, "image too large".into()))?;
        let data = std::slice::from_raw_parts(pixels, n).to_vec();
        emit_image(out, GrayImage::new(width, height, data))
    })
}

#[no_mangle]
pub unsafe extern "C" fn wc_image_load_pgm(
    path: *const c_char,
    out: *mut *mut WcImage,
) -> WcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = ptr::null_mut();
        let img = load_pgm(to_path(path)?)?;
        emit(out, WcImage(img))
    })
}

/// Writes binary (P5) or ASCII (P2) PGM, rounding to the nearest integer.
#[no_mangle]
pub unsafe extern "C" fn wc_image_write_pgm(
    img: *const WcImage,
    path: *const c_char,
    binary: bool,
) -> WcStatus {
    guard(|| {
        let img = image(img, "image")?;
        write_pgm(img, to_path(path)?, binary)?;
        Ok(())
    })
}

/// Width in pixels, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn wc_image_width(img: *const WcImage) -> usize {
    img.as_ref().map_or(0, |h| h.0.width())
}

/// Height in pixels, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn wc_image_height(img: *const WcImage) -> usize {
    img.as_ref().map_or(0, |h| h.0.height())
}

/// Copies the row-major samples into `out`, which must hold exactly
/// `width * height` values.
#[no_mangle]
pub unsafe extern "C" fn wc_image_copy_pixels(
    img: *const WcImage,
    out: *mut f64,
    len: usize,
) -> WcStatus {
    guard(|| {
        let img = image(img, "image")?;
        if out.is_null() {
            return Err(null("output buffer"));
        }
        let px = img.pixels();
        if len != px.len() {
            return Err(Failure(
                WcStatus::DimensionMismatch,
                format!("buffer holds {len} samples, image has {}", px.len()),
            ));
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(px);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn wc_image_free(img: *mut WcImage) {
    if !img.is_null() {
        drop(Box::from_raw(img));
    }
}

/// Additive Gaussian noise on the unit scale, clipped to the valid range.
#[no_mangle]
pub unsafe extern "C" fn wc_add_gaussian(
    img: *const WcImage,
    mean: f64,
    variance: f64,
    seed: u64,
    out: *mut *mut WcImage,
) -> WcStatus {
    guard(|| {
        emit_image(
            out,
            add_gaussian(image(img, "image")?, mean, variance, seed),
        )
    })
}

/// Multiplicative uniform noise `I + n·I` with `Var(n) = variance`.
#[no_mangle]
pub unsafe extern "C" fn wc_add_speckle(
    img: *const WcImage,
    variance: f64,
    seed: u64,
    out: *mut *mut WcImage,
) -> WcStatus {
    guard(|| emit_image(out, add_speckle(image(img, "image")?, variance, seed)))
}

#[no_mangle]
pub unsafe extern "C" fn wc_add_salt_pepper(
    img: *const WcImage,
    density: f64,
    seed: u64,
    out: *mut *mut WcImage,
) -> WcStatus {
    guard(|| emit_image(out, add_salt_pepper(image(img, "image")?, density, seed)))
}

/// Haar wavelet denoising over `levels` levels. `lambda` is ignored for
/// `WC_RULE_BAYES_SOFT`.
#[no_mangle]
pub unsafe extern "C" fn wc_denoise(
    img: *const WcImage,
    levels: usize,
    rule: WcRule,
    lambda: f64,
    out: *mut *mut WcImage,
) -> WcStatus {
    guard(|| {
        let rule = match rule {
            WcRule::Hard => ThresholdRule::Hard(lambda),
            WcRule::Soft => ThresholdRule::Soft(lambda),
            WcRule::BayesSoft => ThresholdRule::BayesSoft,
        };
        let result = denoise(image(img, "image")?, levels, rule).map(|(d, _)| d);
        emit_image(out, result)
    })
}

#[no_mangle]
pub extern "C" fn wc_harris_params_default() -> WcHarrisParams {
    HarrisParams::default().into()
}

/// Runs the detector; `params` may be null for the defaults.
#[no_mangle]
pub unsafe extern "C" fn wc_harris(
    img: *const WcImage,
    params: *const WcHarrisParams,
    out: *mut *mut WcCornerSet,
) -> WcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = ptr::null_mut();
        let img = image(img, "image")?;
        let p = params
            .as_ref()
            .map_or_else(HarrisParams::default, |p| (*p).into());
        emit(out, WcCornerSet(harris(img, &p)?))
    })
}

/// Number of corners, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn wc_corner_set_len(set: *const WcCornerSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn wc_corner_set_get(
    set: *const WcCornerSet,
    index: usize,
    out: *mut WcCorner,
) -> WcStatus {
    guard(|| {
        let set = set.as_ref().ok_or_else(|| null("corner set"))?;
        let out = out.as_mut().ok_or_else(|| null("output pointer"))?;
        let c = set.0.corners.get(index).ok_or_else(|| {
            Failure(
                WcStatus::InvalidArgument,
                format!("index {index} out of range for {} corners", set.0.len()),
            )
        })?;
        *out = WcCorner {
            x: c.x,
            y: c.y,
            response: c.response,
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn wc_corner_set_free(set: *mut WcCornerSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

#[no_mangle]
pub unsafe extern "C" fn wc_mse(a: *const WcImage, b: *const WcImage, out: *mut f64) -> WcStatus {
    guard(|| {
        let v = mse(image(a, "first image")?, image(b, "second image")?)?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = v;
        Ok(())
    })
}

/// Peak signal-to-noise ratio in dB; +infinity for identical images.
#[no_mangle]
pub unsafe extern "C" fn wc_psnr(a: *const WcImage, b: *const WcImage, out: *mut f64) -> WcStatus {
    guard(|| {
        let v = psnr(image(a, "first image")?, image(b, "second image")?)?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = v;
        Ok(())
    })
}
