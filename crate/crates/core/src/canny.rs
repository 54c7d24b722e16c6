//! Gradient, thinning, and double-threshold stages of a Canny detector.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::image::{GrayImage, MagnitudeMap, Mask};

#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    pub gx: Grid<f64>,
    pub gy: Grid<f64>,
    pub magnitude: MagnitudeMap,
    /// Radians in `(−π, π]`.
    pub direction: Grid<f64>,
}

/// Thresholds as fractions of the largest magnitude, plus the pre-smoothing
/// standard deviation (0 disables smoothing).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HysteresisParams {
    pub high_frac: f64,
    pub low_frac: f64,
    pub sigma: f64,
}

impl HysteresisParams {
    pub const DEFAULT_HIGH: f64 = 0.15;
    pub const DEFAULT_LOW: f64 = 0.05;

    pub fn new(high_frac: f64, low_frac: f64, sigma: f64) -> Result<Self> {
        let p = HysteresisParams {
            high_frac,
            low_frac,
            sigma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.low_frac > 0.0 && self.low_frac < self.high_frac && self.high_frac <= 1.0) {
            return Err(Error::invalid(format!(
                "thresholds must satisfy 0 < low < high <= 1 (low={}, high={})",
                self.low_frac, self.high_frac
            )));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        Ok(())
    }
}

impl Default for HysteresisParams {
    fn default() -> Self {
        HysteresisParams {
            high_frac: Self::DEFAULT_HIGH,
            low_frac: Self::DEFAULT_LOW,
            sigma: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeLabel {
    None,
    Weak,
    Strong,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeMap {
    pub labels: Grid<EdgeLabel>,
    /// Strong pixels plus weak pixels linked to them.
    pub mask: Mask,
}

impl EdgeMap {
    pub fn empty(width: usize, height: usize) -> Self {
        EdgeMap {
            labels: Grid::filled(width, height, EdgeLabel::None),
            mask: Grid::filled(width, height, false),
        }
    }

    pub fn edge_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

pub fn gaussian_smooth(img: &GrayImage, sigma: f64) -> Result<GrayImage> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("sigma must be >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as isize;
    let horizontal = Grid::from_fn(img.width(), img.height(), |x, y| {
        kernel
            .iter()
            .enumerate()
            .map(|(k, w)| w * img.clamped(x as isize + k as isize - radius, y as isize))
            .sum::<f64>()
    });
    Ok(Grid::from_fn(img.width(), img.height(), |x, y| {
        kernel
            .iter()
            .enumerate()
            .map(|(k, w)| w * horizontal.clamped(x as isize, y as isize + k as isize - radius))
            .sum::<f64>()
    }))
}

pub const SOBEL_X: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
pub const SOBEL_Y: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];

const SOBEL_WEIGHTS: [f64; 3] = [1.0, 2.0, 1.0];

/// Sobel responses written as weighted central differences, so a flat
/// neighborhood gives exactly zero.
fn sobel_xy(img: &GrayImage, x: usize, y: usize) -> (f64, f64) {
    let (x, y) = (x as isize, y as isize);
    let mut gx = 0.0;
    let mut gy = 0.0;
    for (d, w) in (-1..=1).zip(SOBEL_WEIGHTS) {
        gx += w * (img.clamped(x + 1, y + d) - img.clamped(x - 1, y + d));
        gy += w * (img.clamped(x + d, y + 1) - img.clamped(x + d, y - 1));
    }
    (gx, gy)
}

/// `atan2(gy, gx)` folded into `(−π, π]`, with 0 for a zero gradient.
pub fn direction_of(gx: f64, gy: f64) -> f64 {
    if gx == 0.0 && gy == 0.0 {
        return 0.0;
    }
    let a = gy.atan2(gx);
    if a <= -PI {
        PI
    } else {
        a
    }
}

pub fn sobel_gradients(img: &GrayImage) -> Result<GradientField> {
    if img.width() < 3 || img.height() < 3 {
        return Err(Error::invalid(format!(
            "gradients need at least 3x3, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    let both = Grid::from_fn(img.width(), img.height(), |x, y| sobel_xy(img, x, y));
    let gx = both.map(|g| g.0);
    let gy = both.map(|g| g.1);
    let magnitude = Grid::from_fn(img.width(), img.height(), |x, y| gx.get(x, y).hypot(*gy.get(x, y)));
    let direction = Grid::from_fn(img.width(), img.height(), |x, y| direction_of(*gx.get(x, y), *gy.get(x, y)));
    Ok(GradientField {
        gx,
        gy,
        magnitude,
        direction,
    })
}

pub fn gradient_direction(field: &GradientField) -> Grid<f64> {
    Grid::from_fn(field.gx.width(), field.gx.height(), |x, y| {
        direction_of(*field.gx.get(x, y), *field.gy.get(x, y))
    })
}

/// Neighbor offset along the gradient, direction quantized to 0/45/90/135°
/// (mod 180°). Bin edges round down.
fn quantized_offset(direction: f64) -> (isize, isize) {
    let deg = direction.to_degrees().rem_euclid(180.0);
    if !(22.5..157.5).contains(&deg) {
        (1, 0)
    } else if deg < 67.5 {
        (1, 1)
    } else if deg < 112.5 {
        (0, 1)
    } else {
        (-1, 1)
    }
}

/// Keeps pixels at least as large as both neighbors along the gradient.
pub fn non_max_suppress(magnitude: &MagnitudeMap, direction: &Grid<f64>) -> Result<MagnitudeMap> {
    if !magnitude.same_shape(direction) {
        return Err(Error::invalid("magnitude and direction differ in size"));
    }
    Ok(Grid::from_fn(magnitude.width(), magnitude.height(), |x, y| {
        let m = *magnitude.get(x, y);
        if m == 0.0 {
            return 0.0;
        }
        let (dx, dy) = quantized_offset(*direction.get(x, y));
        let (x, y) = (x as isize, y as isize);
        let a = *magnitude.clamped(x + dx, y + dy);
        let b = *magnitude.clamped(x - dx, y - dy);
        if m >= a && m >= b {
            m
        } else {
            0.0
        }
    }))
}

pub fn hysteresis(magnitude: &MagnitudeMap, params: &HysteresisParams) -> Result<EdgeMap> {
    params.validate()?;
    let (w, h) = (magnitude.width(), magnitude.height());
    let mmax = magnitude.max_value();
    if mmax <= 0.0 {
        return Ok(EdgeMap::empty(w, h));
    }
    let high = params.high_frac * mmax;
    let low = params.low_frac * mmax;
    let labels = magnitude.map(|&m| {
        if m >= high {
            EdgeLabel::Strong
        } else if m >= low {
            EdgeLabel::Weak
        } else {
            EdgeLabel::None
        }
    });

    let mut mask = Grid::filled(w, h, false);
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if *labels.get(x, y) == EdgeLabel::Strong {
                mask.set(x, y, true);
                stack.push((x, y));
            }
        }
    }
    while let Some((x, y)) = stack.pop() {
        for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
            for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                if !*mask.get(nx, ny) && *labels.get(nx, ny) == EdgeLabel::Weak {
                    mask.set(nx, ny, true);
                    stack.push((nx, ny));
                }
            }
        }
    }
    Ok(EdgeMap { labels, mask })
}
