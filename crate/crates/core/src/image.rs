//! Image containers and color encodings.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::quaternion::Quaternion;

pub type GrayImage = Grid<f64>;
pub type MagnitudeMap = Grid<f64>;
/// Pure quaternions `r·i + g·j + b·k`, one per pixel.
pub type QuaternionImage = Grid<Quaternion>;
pub type Mask = Grid<bool>;

/// Interleaved samples, normalized to `[0, 1]` when decoded from files.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<f64>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<f64>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::invalid(format!("unsupported channel count {channels}")));
        }
        if width == 0 || height == 0 {
            return Err(Error::invalid("zero dimension"));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(channels))
            .ok_or_else(|| Error::invalid("image dimensions overflow"))?;
        if samples.len() != expected {
            return Err(Error::invalid(format!(
                "expected {expected} samples, got {}",
                samples.len()
            )));
        }
        Ok(RasterImage {
            width,
            height,
            channels,
            samples,
        })
    }

    pub fn from_rgb_fn<F>(width: usize, height: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> [f64; 3],
    {
        let mut samples = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                samples.extend_from_slice(&f(x, y));
            }
        }
        RasterImage::new(width, height, 3, samples)
    }

    pub fn from_gray(gray: &GrayImage) -> Result<Self> {
        RasterImage::new(gray.width(), gray.height(), 1, gray.as_slice().to_vec())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// Samples of pixel `(x, y)`, `channels` long.
    pub fn pixel(&self, x: usize, y: usize) -> &[f64] {
        let i = (y * self.width + x) * self.channels;
        &self.samples[i..i + self.channels]
    }

    /// RGB of pixel `index` (row-major); gray images replicate their one channel.
    pub fn rgb(&self, index: usize) -> [f64; 3] {
        let i = index * self.channels;
        if self.channels == 3 {
            [self.samples[i], self.samples[i + 1], self.samples[i + 2]]
        } else {
            let v = self.samples[i];
            [v, v, v]
        }
    }

    /// Three-channel copy; gray images are replicated across channels.
    pub fn to_rgb(&self) -> RasterImage {
        if self.channels == 3 {
            return self.clone();
        }
        let samples = self.samples.iter().flat_map(|&v| [v, v, v]).collect();
        RasterImage {
            width: self.width,
            height: self.height,
            channels: 3,
            samples,
        }
    }

    /// Every sample multiplied by `c`.
    pub fn scaled(&self, c: f64) -> RasterImage {
        RasterImage {
            samples: self.samples.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    pub(crate) fn check_filterable(&self) -> Result<()> {
        if self.width < 3 || self.height < 3 {
            return Err(Error::invalid(format!(
                "image is {}x{}, filtering needs at least 3x3",
                self.width, self.height
            )));
        }
        Ok(())
    }
}

pub fn to_quaternion_image(img: &RasterImage) -> Result<QuaternionImage> {
    if img.channels() != 3 {
        return Err(Error::invalid("quaternion encoding needs a 3-channel image"));
    }
    Ok(Grid::from_fn(img.width(), img.height(), |x, y| {
        let p = img.pixel(x, y);
        Quaternion::pure(p[0], p[1], p[2])
    }))
}

/// ITU-R 601 luma weights.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

pub fn to_grayscale(img: &RasterImage) -> GrayImage {
    Grid::from_fn(img.width(), img.height(), |x, y| {
        let p = img.pixel(x, y);
        if img.channels() == 1 {
            p[0]
        } else {
            LUMA_WEIGHTS[0] * p[0] + LUMA_WEIGHTS[1] * p[1] + LUMA_WEIGHTS[2] * p[2]
        }
    })
}
