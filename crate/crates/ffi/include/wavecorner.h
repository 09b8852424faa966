#ifndef WAVECORNER_H
#define WAVECORNER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum WcStatus {
  WC_STATUS_OK = 0,
  WC_STATUS_NULL_POINTER = 1,
  WC_STATUS_INVALID_ARGUMENT = 2,
  WC_STATUS_DIMENSION_MISMATCH = 3,
  WC_STATUS_IO = 4,
  WC_STATUS_FORMAT = 5,
  WC_STATUS_PANIC = 6,
} WcStatus;

typedef enum WcRule {
  WC_RULE_HARD = 0,
  WC_RULE_SOFT = 1,
  WC_RULE_BAYES_SOFT = 2,
} WcRule;

/**
 * Corners ordered by descending response.
 */
typedef struct WcCornerSet WcCornerSet;

/**
 * Grayscale image with samples in `[0, 255]`.
 */
typedef struct WcImage WcImage;

typedef struct WcHarrisParams {
  double k;
  double window_sigma;
  size_t window_radius;
  /**
   * Fraction of the maximum response, or an absolute response when
   * `threshold_is_absolute` is set.
   */
  double threshold;
  bool threshold_is_absolute;
  size_t nms_radius;
} WcHarrisParams;

typedef struct WcCorner {
  /**
   * Column.
   */
  size_t x;
  /**
   * Row.
   */
  size_t y;
  double response;
} WcCorner;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *wc_status_str(enum WcStatus status);

/**
 * Message of the last failure on this thread, or null if none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *wc_last_error_message(void);

/**
 * Creates an image from `width * height` row-major samples.
 */
enum WcStatus wc_image_new(size_t width, size_t height, const double *pixels, struct WcImage **out);

enum WcStatus wc_image_load_pgm(const char *path, struct WcImage **out);

/**
 * Writes binary (P5) or ASCII (P2) PGM, rounding to the nearest integer.
 */
enum WcStatus wc_image_write_pgm(const struct WcImage *img, const char *path, bool binary);

/**
 * Width in pixels, or 0 for a null handle.
 */
size_t wc_image_width(const struct WcImage *img);

/**
 * Height in pixels, or 0 for a null handle.
 */
size_t wc_image_height(const struct WcImage *img);

/**
 * Copies the row-major samples into `out`, which must hold exactly
 * `width * height` values.
 */
enum WcStatus wc_image_copy_pixels(const struct WcImage *img, double *out, size_t len);

void wc_image_free(struct WcImage *img);

/**
 * Additive Gaussian noise on the unit scale, clipped to the valid range.
 */
enum WcStatus wc_add_gaussian(const struct WcImage *img,
                              double mean,
                              double variance,
                              uint64_t seed,
                              struct WcImage **out);

/**
 * Multiplicative uniform noise `I + n·I` with `Var(n) = variance`.
 */
enum WcStatus wc_add_speckle(const struct WcImage *img,
                             double variance,
                             uint64_t seed,
                             struct WcImage **out);

enum WcStatus wc_add_salt_pepper(const struct WcImage *img,
                                 double density,
                                 uint64_t seed,
                                 struct WcImage **out);

/**
 * Haar wavelet denoising over `levels` levels. `lambda` is ignored for
 * `WC_RULE_BAYES_SOFT`.
 */
enum WcStatus wc_denoise(const struct WcImage *img,
                         size_t levels,
                         enum WcRule rule,
                         double lambda,
                         struct WcImage **out);

struct WcHarrisParams wc_harris_params_default(void);

/**
 * Runs the detector; `params` may be null for the defaults.
 */
enum WcStatus wc_harris(const struct WcImage *img,
                        const struct WcHarrisParams *params,
                        struct WcCornerSet **out);

/**
 * Number of corners, or 0 for a null handle.
 */
size_t wc_corner_set_len(const struct WcCornerSet *set);

enum WcStatus wc_corner_set_get(const struct WcCornerSet *set, size_t index, struct WcCorner *out);

void wc_corner_set_free(struct WcCornerSet *set);

enum WcStatus wc_mse(const struct WcImage *a, const struct WcImage *b, double *out);

/**
 * Peak signal-to-noise ratio in dB; +infinity for identical images.
 */
enum WcStatus wc_psnr(const struct WcImage *a, const struct WcImage *b, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WAVECORNER_H */
