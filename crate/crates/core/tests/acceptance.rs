//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line; run with
//! `cargo test -p wavecorner --test acceptance -- --nocapture --test-threads=1`.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wavecorner::bench::{run_bench, BenchConfig, BenchReport};
use wavecorner::cli::{run_bench_cmd, BenchArgs, HarrisArgs};
use wavecorner::harris::{harris, response, HarrisParams};
use wavecorner::image::load_pgm;
use wavecorner::noise::{add_gaussian, NoiseKind};
use wavecorner::shrink::{estimate_noise_sigma, hard, soft};
use wavecorner::synth;
use wavecorner::wavelet::{decompose, dwt2_haar, reconstruct_matrix};
use wavecorner::{GrayImage, Matrix};

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

fn report(id: &str, what: &str, ok: bool, detail: String) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] {id} {what}: {detail}");
    assert!(ok, "{id} {what} failed: {detail}");
}

fn asset() -> GrayImage {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets/scene512.pgm");
    load_pgm(path).expect("shipped test asset")
}

fn bench_reports() -> &'static [BenchReport] {
    use std::sync::OnceLock;
    static REPORTS: OnceLock<Vec<BenchReport>> = OnceLock::new();
    REPORTS.get_or_init(|| {
        let img = asset();
        SEEDS
            .iter()
            .map(|&seed| {
                run_bench(
                    &img,
                    &BenchConfig {
                        seed,
                        ..BenchConfig::default()
                    },
                )
                .unwrap()
            })
            .collect()
    })
}

const GAUSSIAN: NoiseKind = NoiseKind::Gaussian {
    mean: 0.0,
    variance: 0.01,
};
const SPECKLE: NoiseKind = NoiseKind::Speckle { variance: 0.04 };
const SALT_PEPPER: NoiseKind = NoiseKind::SaltPepper { density: 0.05 };

#[test]
fn ac01_perfect_reconstruction() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC01);
    let mut worst: f64 = 0.0;
    let mut odd = 0;
    for _ in 0..100 {
        let w = rng.random_range(8..=257usize);
        let h = rng.random_range(8..=129usize);
        if w % 2 == 1 || h % 2 == 1 {
            odd += 1;
        }
        let px: Vec<f64> = (0..w * h).map(|_| rng.random_range(0.0..=255.0)).collect();
        let img = GrayImage::new(w, h, px).unwrap();
        let m = img.to_matrix();
        for levels in 1..=3 {
            let back = reconstruct_matrix(&decompose(&img, levels).unwrap()).unwrap();
            worst = worst.max(back.max_abs_diff(&m));
        }
    }
    let elapsed = start.elapsed();
    report(
        "AC-1",
        "perfect reconstruction",
        worst < 1e-9 && elapsed < Duration::from_secs(5) && odd > 0,
        format!("max error {worst:e}, {odd} odd-shaped images, {elapsed:?}"),
    );
}

/// Single-level 2D Haar written as `H · M · Hᵀ` with an explicit 1D
/// analysis matrix `H` (low-pass rows first, then high-pass rows).
fn haar_matrix_oracle(m: &Matrix) -> [Matrix; 4] {
    let n = m.rows();
    assert_eq!(n, m.cols());
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let half = n / 2;
    let mut hm = vec![vec![0.0; n]; n];
    for k in 0..half {
        hm[k][2 * k] = s;
        hm[k][2 * k + 1] = s;
        hm[half + k][2 * k] = s;
        hm[half + k][2 * k + 1] = -s;
    }
    // Y = H M Hᵀ
    let tmp: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| hm[i][k] * m.get(k, j)).sum())
                .collect()
        })
        .collect();
    let y: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| tmp[i][k] * hm[j][k]).sum())
                .collect()
        })
        .collect();
    let block = |r0: usize, c0: usize| Matrix::from_fn(half, half, |r, c| y[r0 + r][c0 + c]);
    // Row index of Y follows the column filter, column index the row filter.
    [
        block(0, 0),       // ll
        block(half, 0),    // lh: low along rows, high along columns
        block(0, half),    // hl: high along rows, low along columns
        block(half, half), // hh
    ]
}

#[test]
fn ac02_dwt_matches_matrix_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC02);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let n = if i % 2 == 0 { 2 } else { 4 };
        let m = Matrix::from_fn(n, n, |_, _| f64::from(rng.random_range(0..=9u8)));
        let s = dwt2_haar(&m);
        let o = haar_matrix_oracle(&m);
        for (band, oracle) in [&s.ll, &s.lh, &s.hl, &s.hh].into_iter().zip(&o) {
            worst = worst.max(band.max_abs_diff(oracle));
        }
    }
    let anchor = dwt2_haar(&Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]));
    let anchor_ok = (anchor.ll.get(0, 0) - 5.0).abs() < 1e-9
        && (anchor.hl.get(0, 0) + 1.0).abs() < 1e-9
        && (anchor.lh.get(0, 0) + 2.0).abs() < 1e-9
        && anchor.hh.get(0, 0).abs() < 1e-9;
    report(
        "AC-2",
        "DWT oracle equivalence",
        worst < 1e-9 && anchor_ok,
        format!("max deviation {worst:e} over 1000 matrices, [[1,2],[3,4]] anchor ok={anchor_ok}"),
    );
}

#[test]
fn ac03_energy_conservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC03);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let r = 2 * rng.random_range(1..=64usize);
        let c = 2 * rng.random_range(1..=64usize);
        let m = Matrix::from_fn(r, c, |_, _| rng.random_range(-300.0..300.0));
        let s = dwt2_haar(&m);
        let e = s.ll.energy() + s.lh.energy() + s.hl.energy() + s.hh.energy();
        worst = worst.max((e - m.energy()).abs() / m.energy());
    }
    report(
        "AC-3",
        "energy conservation",
        worst < 1e-9,
        format!("max relative error {worst:e}"),
    );
}

#[test]
fn ac04_noise_sigma_estimator() {
    let flat = GrayImage::filled(512, 512, 0.0);
    let mut lines = Vec::new();
    let mut ok = true;
    for sigma in [0.05, 0.1, 0.2] {
        let truth = sigma * 255.0;
        let mut good = 0;
        for seed in 0..10u64 {
            let noisy = add_gaussian(&flat, 0.5, sigma * sigma, 1000 + seed).unwrap();
            let p = decompose(&noisy, 1).unwrap();
            let est = estimate_noise_sigma(&p.details[0].hh);
            if (est - truth).abs() <= 0.1 * truth {
                good += 1;
            }
        }
        ok &= good >= 9;
        lines.push(format!("sigma {sigma}: {good}/10 within 10%"));
    }
    report("AC-4", "noise sigma estimator", ok, lines.join(", "));
}

#[test]
fn ac05_threshold_operator_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC05);
    let mut failures = 0usize;
    let sgn = |x: f64| {
        if x > 0.0 {
            1
        } else if x < 0.0 {
            -1
        } else {
            0
        }
    };
    for _ in 0..100_000 {
        let u: f64 = rng.random_range(-100.0..100.0);
        let v: f64 = rng.random_range(-100.0..100.0);
        let l: f64 = rng.random_range(0.0..50.0);
        let (su, sv, hu) = (soft(u, l), soft(v, l), hard(u, l));
        // Differences of shrunk values carry up to a few ulps of rounding.
        let ulps = 4.0 * f64::EPSILON * u.abs().max(v.abs());
        let checks = [
            su.abs() <= u.abs(),
            (su - sv).abs() <= (u - v).abs() + ulps,
            sgn(su) == 0 || sgn(su) == sgn(u),
            sgn(hu) == 0 || sgn(hu) == sgn(u),
            if u.abs() > l { hu == u } else { hu == 0.0 },
            u.abs() > l || (hu == 0.0 && su == 0.0),
            soft(u, 0.0) == u,
        ];
        failures += checks.iter().filter(|c| !**c).count();
    }
    report(
        "AC-5",
        "thresholding operator laws",
        failures == 0,
        format!("{failures} violations over 1e5 samples"),
    );
}

#[test]
fn ac06_denoising_improves_psnr() {
    let mut gains = Vec::new();
    for r in bench_reports() {
        let row = r.psnr_row(&GAUSSIAN, 2).unwrap();
        gains.push(row.psnr_denoised - row.psnr_noisy);
    }
    let row = bench_reports()[0].psnr_row(&GAUSSIAN, 2).unwrap();
    report(
        "AC-6",
        "denoising improves PSNR by >= 0.5 dB",
        gains.iter().all(|g| *g >= 0.5),
        format!(
            "gains {gains:.3?} dB (seed 1: {:.4} -> {:.4} dB)",
            row.psnr_noisy, row.psnr_denoised
        ),
    );
}

#[test]
fn ac07_level_ordering() {
    let mut lines = Vec::new();
    let mut ok = true;
    for kind in [GAUSSIAN, SPECKLE] {
        let wins = bench_reports()
            .iter()
            .filter(|r| {
                r.psnr_row(&kind, 2).unwrap().psnr_denoised
                    > r.psnr_row(&kind, 1).unwrap().psnr_denoised
            })
            .count();
        ok &= wins * 2 > SEEDS.len();
        lines.push(format!("{}: level 2 > level 1 in {wins}/5", kind.name()));
    }
    report("AC-7", "level ordering", ok, lines.join(", "));
}

#[test]
fn ac08_noise_type_ordering() {
    let mut ok = true;
    let mut worst_margin = f64::INFINITY;
    for r in bench_reports() {
        for level in [1, 2] {
            let sp = r.psnr_row(&SALT_PEPPER, level).unwrap().psnr_denoised;
            for other in [GAUSSIAN, SPECKLE] {
                let o = r.psnr_row(&other, level).unwrap().psnr_denoised;
                ok &= sp < o;
                worst_margin = worst_margin.min(o - sp);
            }
        }
    }
    report(
        "AC-8",
        "salt & pepper has the lowest PSNR",
        ok,
        format!("smallest margin {worst_margin:.3} dB"),
    );
}

#[test]
fn ac09_corner_count_ordering() {
    let mut ok = true;
    let mut lines = Vec::new();
    for kind in [GAUSSIAN, SPECKLE] {
        let mut counts = Vec::new();
        for r in bench_reports() {
            let orig = r.original_corners().unwrap() as i64;
            let noisy = r.noisy_corners(&kind).unwrap() as i64;
            let den = r.denoised_corners(&kind, 2).unwrap() as i64;
            ok &= noisy > den && (den - orig).abs() < (noisy - orig).abs();
            counts.push(format!("{orig}/{noisy}/{den}"));
        }
        lines.push(format!(
            "{} original/noisy/denoised = {}",
            kind.name(),
            counts.join(" ")
        ));
    }
    report("AC-9", "corner-count ordering", ok, lines.join("; "));
}

/// Straight-loop Harris: 2D window sums, explicit clamping, direct NMS.
fn brute_force_corners(img: &GrayImage, p: &HarrisParams) -> Vec<(usize, usize)> {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let px = |x: isize, y: isize| img.get(x.clamp(0, w - 1) as usize, y.clamp(0, h - 1) as usize);
    let gx = |x: isize, y: isize| px(x + 1, y) - px(x - 1, y);
    let gy = |x: isize, y: isize| px(x, y + 1) - px(x, y - 1);
    let r = p.window_radius as isize;
    let mut weights = Vec::new();
    let mut total = 0.0;
    for dy in -r..=r {
        for dx in -r..=r {
            let wgt =
                (-((dx * dx + dy * dy) as f64) / (2.0 * p.window_sigma * p.window_sigma)).exp();
            weights.push((dx, dy, wgt));
            total += wgt;
        }
    }
    let mut resp = vec![vec![0.0; w as usize]; h as usize];
    for y in 0..h {
        for x in 0..w {
            let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
            for &(dx, dy, wgt) in &weights {
                let qx = (x + dx).clamp(0, w - 1);
                let qy = (y + dy).clamp(0, h - 1);
                let (ix, iy) = (gx(qx, qy), gy(qx, qy));
                a += wgt / total * ix * ix;
                b += wgt / total * ix * iy;
                c += wgt / total * iy * iy;
            }
            resp[y as usize][x as usize] = a * c - b * b - p.k * (a + c) * (a + c);
        }
    }
    let max = resp
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let frac = match p.threshold {
        wavecorner::harris::CornerThreshold::Relative(f) => f * max,
        wavecorner::harris::CornerThreshold::Absolute(t) => t,
    };
    let n = p.nms_radius as isize;
    let mut found = Vec::new();
    for y in r..h - r {
        for x in r..w - r {
            let v = resp[y as usize][x as usize];
            if v <= 0.0 || v <= frac {
                continue;
            }
            let mut best = true;
            for qy in (y - n).max(0)..=(y + n).min(h - 1) {
                for qx in (x - n).max(0)..=(x + n).min(w - 1) {
                    if (qx, qy) == (x, y) {
                        continue;
                    }
                    let q = resp[qy as usize][qx as usize];
                    let before = qy < y || (qy == y && qx < x);
                    let tied = (q - v).abs() <= 1e-12 * q.abs().max(v.abs());
                    if (q > v && !tied) || (before && tied) {
                        best = false;
                    }
                }
            }
            if best {
                found.push((x as usize, y as usize));
            }
        }
    }
    found.sort();
    found
}

#[test]
fn ac10_harris_synthetic() {
    let p = HarrisParams::default();
    let square = harris(&synth::white_square(32, 12), &p).unwrap();
    let vertices = [(10, 10), (21, 10), (10, 21), (21, 21)];
    let square_ok = square.len() == 4
        && vertices.iter().all(|&(vx, vy)| {
            square.corners.iter().any(|c| {
                (c.x as isize - vx as isize).abs() <= 1 && (c.y as isize - vy as isize).abs() <= 1
            })
        });

    let constant_ok = [0.0, 100.0, 255.0].iter().all(|&v| {
        harris(&GrayImage::filled(64, 64, v), &p)
            .unwrap()
            .is_empty()
    });

    let board = synth::checkerboard(64, 8);
    let mut got = harris(&board, &p).unwrap().positions();
    got.sort();
    let oracle = brute_force_corners(&board, &p);
    let square_oracle = brute_force_corners(&synth::white_square(32, 12), &p);
    let mut square_got = square.positions();
    square_got.sort();

    report(
        "AC-10",
        "Harris synthetic correctness",
        square_ok && constant_ok && got == oracle && square_got == square_oracle,
        format!(
            "square {:?}, constant empty={constant_ok}, checkerboard {} corners (oracle {})",
            square.positions(),
            got.len(),
            oracle.len()
        ),
    );
}

#[test]
fn ac11_response_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC11);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        // PSD tensor as a Gram matrix of random gradient samples.
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for _ in 0..rng.random_range(1..6) {
            let gx: f64 = rng.random_range(-50.0..50.0);
            let gy: f64 = rng.random_range(-50.0..50.0);
            a += gx * gx;
            b += gx * gy;
            c += gy * gy;
        }
        let mean = 0.5 * (a + c);
        let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        let (l1, l2) = (mean + disc, mean - disc);
        let via_eigen = l1 * l2 - 0.04 * (l1 + l2) * (l1 + l2);
        let direct = response(a, b, c, 0.04);
        let scale = (0.04 * (a + c) * (a + c)).max(a * c).max(1e-300);
        worst = worst.max((direct - via_eigen).abs() / scale);
    }
    report(
        "AC-11",
        "det/trace response equals eigenvalue form",
        worst < 1e-9,
        format!("max relative deviation {worst:e}"),
    );
}

#[test]
fn ac12_bench_determinism_and_runtime() {
    let input = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets/scene512.pgm");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut timings = Vec::new();
    for d in &dirs {
        let args = BenchArgs {
            input: input.clone(),
            out_dir: d.path().to_path_buf(),
            seed: 42,
            levels: vec![1, 2],
            rule: Default::default(),
            harris: HarrisArgs {
                harris_k: 0.04,
                harris_sigma: 1.0,
                harris_radius: 3,
                harris_rel_threshold: 0.01,
                harris_abs_threshold: None,
                harris_nms_radius: 1,
            },
        };
        let t = Instant::now();
        let r = run_bench_cmd(&args).unwrap();
        timings.push(t.elapsed());
        assert_eq!(r.psnr.len(), 6);
        assert_eq!(r.corners.len(), 10);
    }
    let read = |d: &tempfile::TempDir, f: &str| std::fs::read(d.path().join(f)).unwrap();
    let identical = ["bench_psnr.csv", "bench_corners.csv"]
        .iter()
        .all(|f| read(&dirs[0], f) == read(&dirs[1], f));
    let slowest = timings.iter().max().copied().unwrap();
    report(
        "AC-12",
        "bench determinism and runtime",
        identical && slowest < Duration::from_secs(60),
        format!("byte-identical={identical}, slowest run {slowest:?}"),
    );
}
