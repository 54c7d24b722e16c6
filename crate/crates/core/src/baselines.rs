//! Grayscale reference detectors.

use crate::canny::{
    gaussian_smooth, hysteresis, non_max_suppress, sobel_gradients, EdgeLabel, EdgeMap,
    HysteresisParams,
};
use crate::error::{Error, Result};
use crate::image::{to_grayscale, RasterImage};

pub const DEFAULT_SOBEL_THRESHOLD: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BaselineKind {
    Sobel { threshold_frac: f64 },
    Canny(HysteresisParams),
}

impl BaselineKind {
    pub fn run(&self, img: &RasterImage) -> Result<EdgeMap> {
        match self {
            BaselineKind::Sobel { threshold_frac } => sobel_edges(img, *threshold_frac),
            BaselineKind::Canny(p) => classic_canny(img, p),
        }
    }
}

/// Pixels whose Sobel magnitude reaches `threshold_frac` of the maximum.
pub fn sobel_edges(img: &RasterImage, threshold_frac: f64) -> Result<EdgeMap> {
    if !(threshold_frac > 0.0 && threshold_frac <= 1.0) {
        return Err(Error::invalid(format!(
            "sobel threshold {threshold_frac} outside (0, 1]"
        )));
    }
    let field = sobel_gradients(&to_grayscale(img))?;
    let mmax = field.magnitude.max_value();
    if mmax <= 0.0 {
        return Ok(EdgeMap::empty(img.width(), img.height()));
    }
    let cut = threshold_frac * mmax;
    let mask = field.magnitude.map(|&m| m >= cut);
    let labels = mask.map(|&m| if m { EdgeLabel::Strong } else { EdgeLabel::None });
    Ok(EdgeMap { labels, mask })
}

/// Blur, Sobel, thinning, hysteresis on the luma channel.
pub fn classic_canny(img: &RasterImage, params: &HysteresisParams) -> Result<EdgeMap> {
    params.validate()?;
    let smoothed = gaussian_smooth(&to_grayscale(img), params.sigma)?;
    let field = sobel_gradients(&smoothed)?;
    let thin = non_max_suppress(&field.magnitude, &field.direction)?;
    hysteresis(&thin, params)
}
