//! Synthetic test images.
//!
//! [`scene`] renders the 512×512 reference asset shipped as
//! `assets/scene512.pgm`; the remaining generators build small geometric
//! patterns with analytically known corners.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::GrayImage;

/// Black `size`×`size` image with a centered white `side`×`side` square.
pub fn white_square(size: usize, side: usize) -> GrayImage {
    let start = (size - side) / 2;
    let inside = |v: usize| (start..start + side).contains(&v);
    GrayImage::from_fn(
        size,
        size,
        |x, y| if inside(x) && inside(y) { 255.0 } else { 0.0 },
    )
}

/// Alternating black/white blocks, starting black at the origin.
pub fn checkerboard(size: usize, block: usize) -> GrayImage {
    GrayImage::from_fn(size, size, |x, y| {
        if (x / block + y / block).is_multiple_of(2) {
            0.0
        } else {
            255.0
        }
    })
}

/// Horizontal ramp spanning `[0, 255]`.
pub fn ramp(width: usize, height: usize) -> GrayImage {
    let denom = (width.max(2) - 1) as f64;
    GrayImage::from_fn(width, height, |x, _| 255.0 * x as f64 / denom)
}

enum Shape {
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
    Disk { cx: f64, cy: f64, r: f64 },
    Triangle { p: [(f64, f64); 3] },
}

impl Shape {
    fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Shape::Rect { x0, y0, x1, y1 } => x >= x0 && x < x1 && y >= y0 && y < y1,
            Shape::Disk { cx, cy, r } => (x - cx).powi(2) + (y - cy).powi(2) <= r * r,
            Shape::Triangle { p } => {
                let side = |a: (f64, f64), b: (f64, f64)| {
                    (b.0 - a.0) * (y - a.1) - (b.1 - a.1) * (x - a.0)
                };
                let d = [side(p[0], p[1]), side(p[1], p[2]), side(p[2], p[0])];
                d.iter().all(|&v| v >= 0.0) || d.iter().all(|&v| v <= 0.0)
            }
        }
    }
}

/// Piecewise-smooth grayscale scene: shaded background, overlapping
/// rectangles, disks and triangles, plus a block of window-like tiles.
/// Intensities stay inside `[20, 235]`. Deterministic for a given `size`.
pub fn scene(size: usize) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5CE9E);
    let s = size as f64;
    let mut shapes: Vec<(Shape, f64)> = Vec::new();

    for _ in 0..24 {
        let w = rng.random_range(0.05..0.22) * s;
        let h = rng.random_range(0.05..0.22) * s;
        let x0 = rng.random_range(0.0..s - w);
        let y0 = rng.random_range(0.0..s - h);
        let level = rng.random_range(30.0..225.0);
        shapes.push((
            Shape::Rect {
                x0,
                y0,
                x1: x0 + w,
                y1: y0 + h,
            },
            level,
        ));
    }
    for _ in 0..10 {
        let r = rng.random_range(0.03..0.09) * s;
        let cx = rng.random_range(r..s - r);
        let cy = rng.random_range(r..s - r);
        let level = rng.random_range(30.0..225.0);
        shapes.push((Shape::Disk { cx, cy, r }, level));
    }
    for _ in 0..8 {
        let cx = rng.random_range(0.1..0.9) * s;
        let cy = rng.random_range(0.1..0.9) * s;
        let mut p = [(0.0, 0.0); 3];
        for v in &mut p {
            *v = (
                cx + rng.random_range(-0.1..0.1) * s,
                cy + rng.random_range(-0.1..0.1) * s,
            );
        }
        let level = rng.random_range(30.0..225.0);
        shapes.push((Shape::Triangle { p }, level));
    }
    // A facade: 4x3 grid of dark windows on a light panel.
    let (fx, fy, fw, fh) = (0.62 * s, 0.58 * s, 0.3 * s, 0.32 * s);
    shapes.push((
        Shape::Rect {
            x0: fx,
            y0: fy,
            x1: fx + fw,
            y1: fy + fh,
        },
        200.0,
    ));
    for row in 0..3 {
        for col in 0..4 {
            let x0 = fx + (0.04 + 0.065 * col as f64) * s;
            let y0 = fy + (0.04 + 0.095 * row as f64) * s;
            shapes.push((
                Shape::Rect {
                    x0,
                    y0,
                    x1: x0 + 0.04 * s,
                    y1: y0 + 0.06 * s,
                },
                55.0,
            ));
        }
    }

    GrayImage::from_fn(size, size, |x, y| {
        let (xf, yf) = (x as f64 + 0.5, y as f64 + 0.5);
        let mut v = 70.0
            + 60.0 * (xf / s)
            + 30.0 * (yf / s)
            + 12.0
                * (std::f64::consts::TAU * xf / s * 1.5).sin()
                * (std::f64::consts::TAU * yf / s).cos();
        for (shape, level) in &shapes {
            if shape.contains(xf, yf) {
                // Gentle shading inside each object.
                v = level + 10.0 * ((xf + yf) / s - 1.0);
            }
        }
        v.clamp(20.0, 235.0)
    })
}
