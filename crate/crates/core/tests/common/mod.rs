//! Generators and brute-force oracles shared by the integration suites.
#![allow(dead_code)]

use cec_edge::bsds::{boundary_mask, LabelGrid};
use cec_edge::canny::EdgeLabel;
use cec_edge::{Grid, GrayImage, MagnitudeMap, Mask, Quaternion, RasterImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unscaled Prewitt response on `img` with replicate borders, by direct
/// summation over the window.
pub fn prewitt(img: &GrayImage, kernel: [[f64; 3]; 3]) -> Vec<f64> {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let mut out = Vec::with_capacity((w * h) as usize);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for dy in -1..=1isize {
                for dx in -1..=1isize {
                    let sx = (x + dx).clamp(0, w - 1) as usize;
                    let sy = (y + dy).clamp(0, h - 1) as usize;
                    acc += kernel[(dy + 1) as usize][(dx + 1) as usize] * img.get(sx, sy);
                }
            }
            out.push(acc);
        }
    }
    out
}

pub const PREWITT_V: [[f64; 3]; 3] = [[1.0, 1.0, 1.0], [0.0, 0.0, 0.0], [-1.0, -1.0, -1.0]];
pub const PREWITT_H: [[f64; 3]; 3] = [[1.0, 0.0, -1.0], [1.0, 0.0, -1.0], [1.0, 0.0, -1.0]];

/// Rotation of the 3-vector `v` by `phi` about unit `u` (Rodrigues).
pub fn rodrigues(u: [f64; 3], phi: f64, v: [f64; 3]) -> [f64; 3] {
    let (s, c) = phi.sin_cos();
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    std::array::from_fn(|i| v[i] * c + cross[i] * s + u[i] * dot * (1.0 - c))
}

/// Mark strong pixels, then repeatedly promote any weak 8-neighbor of a
/// marked pixel until nothing changes.
pub fn hysteresis_fixpoint(m: &MagnitudeMap, high_frac: f64, low_frac: f64) -> Mask {
    let (w, h) = (m.width(), m.height());
    let max = m.iter().copied().fold(0.0, f64::max);
    let mut mask = Grid::filled(w, h, false);
    if max <= 0.0 {
        return mask;
    }
    let label = |x: usize, y: usize| {
        let v = *m.get(x, y);
        if v >= high_frac * max {
            EdgeLabel::Strong
        } else if v >= low_frac * max {
            EdgeLabel::Weak
        } else {
            EdgeLabel::None
        }
    };
    for y in 0..h {
        for x in 0..w {
            if label(x, y) == EdgeLabel::Strong {
                mask.set(x, y, true);
            }
        }
    }
    loop {
        let mut changed = false;
        for y in 0..h {
            for x in 0..w {
                if *mask.get(x, y) || label(x, y) != EdgeLabel::Weak {
                    continue;
                }
                let mut touches = false;
                for dy in -1..=1isize {
                    for dx in -1..=1isize {
                        let nx = x as isize + dx;
                        let ny = y as isize + dy;
                        if nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h && *mask.get(nx as usize, ny as usize) {
                            touches = true;
                        }
                    }
                }
                if touches {
                    mask.set(x, y, true);
                    changed = true;
                }
            }
        }
        if !changed {
            return mask;
        }
    }
}

/// Confusion counts by direct neighborhood search.
pub fn confusion_oracle(pred: &Mask, gt: &Mask, r: usize) -> (u64, u64, u64, u64) {
    let (w, h) = (pred.width(), pred.height());
    let near = |m: &Mask, x: usize, y: usize| {
        let mut found = false;
        for sy in 0..h {
            for sx in 0..w {
                if *m.get(sx, sy) && sx.abs_diff(x) <= r && sy.abs_diff(y) <= r {
                    found = true;
                }
            }
        }
        found
    };
    let (mut tp, mut tn, mut fp, mut fn_) = (0, 0, 0, 0);
    for y in 0..h {
        for x in 0..w {
            let p = *pred.get(x, y);
            if p {
                if near(gt, x, y) {
                    tp += 1
                } else {
                    fp += 1
                }
            } else if *gt.get(x, y) && !near(pred, x, y) {
                fn_ += 1;
            } else {
                tn += 1;
            }
        }
    }
    (tp, tn, fp, fn_)
}

pub fn random_gray(rng: &mut impl Rng, w: usize, h: usize) -> GrayImage {
    Grid::from_vec(w, h, (0..w * h).map(|_| rng.gen::<f64>()).collect()).unwrap()
}

pub fn random_rgb(rng: &mut impl Rng, w: usize, h: usize) -> RasterImage {
    RasterImage::new(w, h, 3, (0..w * h * 3).map(|_| rng.gen::<f64>()).collect()).unwrap()
}

/// Random image that varies smoothly (sum of a few low-frequency waves), so
/// gradients are free of exact ties.
pub fn smooth_gray(rng: &mut impl Rng, w: usize, h: usize) -> GrayImage {
    let waves: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| (rng.gen_range(0.05..0.4), rng.gen_range(0.05..0.4), rng.gen_range(0.0..6.3), rng.gen_range(0.05..0.25)))
        .collect();
    Grid::from_fn(w, h, |x, y| {
        0.5 + waves
            .iter()
            .map(|(fx, fy, ph, a)| a * (fx * x as f64 + fy * y as f64 + ph).sin())
            .sum::<f64>()
            * 0.5
    })
}

pub fn gray_to_rgb(g: &GrayImage) -> RasterImage {
    RasterImage::from_gray(g).unwrap().to_rgb()
}

/// Orthonormal pair spanning the colors of equal luma.
fn iso_luma_basis() -> ([f64; 3], [f64; 3]) {
    let w = cec_edge::image::LUMA_WEIGHTS;
    let a = [w[1], -w[0], 0.0];
    let na = (a[0] * a[0] + a[1] * a[1]).sqrt();
    let a = a.map(|v| v / na);
    let b = [w[1] * a[2] - w[2] * a[1], w[2] * a[0] - w[0] * a[2], w[0] * a[1] - w[1] * a[0]];
    let nb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    (a, b.map(|v| v / nb))
}

/// Color with luma 0.5 and the given hue angle.
pub fn iso_luma_color(hue: f64, chroma: f64) -> [f64; 3] {
    let (a, b) = iso_luma_basis();
    let (s, c) = hue.sin_cos();
    std::array::from_fn(|i| 0.5 + chroma * (c * a[i] + s * b[i]))
}

pub struct Synthetic {
    pub image: RasterImage,
    pub labels: LabelGrid,
    pub gt: Mask,
}

/// Colored elliptical blobs on a background, all of equal luma and
/// distinct hue, plus Gaussian noise of std `noise` on every sample.
pub fn chromatic_blobs(seed: u64, size: usize, noise: f64) -> Synthetic {
    let mut r = rng(seed);
    let blobs = r.gen_range(2..=4);
    let base_hue = r.gen_range(0.0..std::f64::consts::TAU);
    let step = std::f64::consts::TAU / (blobs + 1) as f64;
    let colors: Vec<[f64; 3]> = (0..=blobs).map(|k| iso_luma_color(base_hue + step * k as f64, 0.2)).collect();
    let shapes: Vec<(f64, f64, f64, f64)> = (0..blobs)
        .map(|_| {
            let s = size as f64;
            (r.gen_range(0.2 * s..0.8 * s), r.gen_range(0.2 * s..0.8 * s), r.gen_range(0.1 * s..0.25 * s), r.gen_range(0.1 * s..0.25 * s))
        })
        .collect();
    let labels = Grid::from_fn(size, size, |x, y| {
        let mut l = 0u32;
        for (k, (cx, cy, rx, ry)) in shapes.iter().enumerate() {
            let dx = (x as f64 - cx) / rx;
            let dy = (y as f64 - cy) / ry;
            if dx * dx + dy * dy <= 1.0 {
                l = k as u32 + 1;
            }
        }
        l
    });
    let normal = Normal::new(0.0, noise).unwrap();
    let mut samples = Vec::with_capacity(size * size * 3);
    for y in 0..size {
        for x in 0..size {
            let c = colors[*labels.get(x, y) as usize];
            for v in c {
                samples.push(v + normal.sample(&mut r));
            }
        }
    }
    let labels = LabelGrid { labels, segment_count: blobs as u32 + 1 };
    let gt = boundary_mask(&labels);
    Synthetic {
        image: RasterImage::new(size, size, 3, samples).unwrap(),
        labels,
        gt,
    }
}

/// Filled disk of `inside` color on `outside`, pixel centers within `radius`.
pub fn disk(size: usize, center: (f64, f64), radius: f64, inside: [f64; 3], outside: [f64; 3]) -> RasterImage {
    RasterImage::from_rgb_fn(size, size, |x, y| {
        let dx = x as f64 - center.0;
        let dy = y as f64 - center.1;
        if dx * dx + dy * dy <= radius * radius {
            inside
        } else {
            outside
        }
    })
    .unwrap()
}

pub fn quaternion_pixels(img: &RasterImage) -> Vec<Quaternion> {
    (0..img.pixel_count())
        .map(|i| {
            let p = img.rgb(i);
            Quaternion::pure(p[0], p[1], p[2])
        })
        .collect()
}
