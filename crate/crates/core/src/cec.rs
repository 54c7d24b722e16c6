//! Quaternion-rotation directional filters and their modulus maps.
//!
//! Each mask is a 3×3 hypercomplex template. A non-zero cell contributes
//! `sign · normalizer · left · f · right` for the pixel `f` under it; with
//! `left = R` and `right = R*` every contribution is the color vector rotated
//! about the mask axis. The horizontal-edge mask takes the rotated top row
//! minus the rotated bottom row; the vertical-edge mask is its transpose.
//! Homogeneous regions cancel exactly, and on gray input (which lies on the
//! rotation axis) the masks reduce to Prewitt differences.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::image::{MagnitudeMap, QuaternionImage};
use crate::quaternion::{Quaternion, RotationOperator};

/// One 3×3 template, indexed `[row][col]` with row 0 at `y − 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuaternionMask {
    pub left: [[Quaternion; 3]; 3],
    pub right: [[Quaternion; 3]; 3],
    pub sign: [[i8; 3]; 3],
    pub normalizer: f64,
}

impl QuaternionMask {
    pub fn transpose(&self) -> QuaternionMask {
        let t = |g: &[[Quaternion; 3]; 3]| std::array::from_fn(|r| std::array::from_fn(|c| g[c][r]));
        QuaternionMask {
            left: t(&self.left),
            right: t(&self.right),
            sign: std::array::from_fn(|r| std::array::from_fn(|c| self.sign[c][r])),
            normalizer: self.normalizer,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaskPair {
    pub horizontal: QuaternionMask,
    pub vertical: QuaternionMask,
}

/// Responses of the two directional masks, same size as the input.
#[derive(Clone, Debug, PartialEq)]
pub struct ResponsePair {
    pub qh: QuaternionImage,
    pub qv: QuaternionImage,
}

pub const MASK_NORMALIZER: f64 = 1.0 / 6.0;

pub fn build_masks(r: &RotationOperator) -> MaskPair {
    let rq = r.quaternion();
    let rc = rq.conj();
    let sign = [[1, 1, 1], [0, 0, 0], [-1, -1, -1]];
    let pick = |q: Quaternion| -> [[Quaternion; 3]; 3] {
        std::array::from_fn(|row| {
            std::array::from_fn(|_| if row == 1 { Quaternion::ZERO } else { q })
        })
    };
    let horizontal = QuaternionMask {
        left: pick(rq),
        right: pick(rc),
        sign,
        normalizer: MASK_NORMALIZER,
    };
    let vertical = horizontal.transpose();
    MaskPair {
        horizontal,
        vertical,
    }
}

/// Positive and negative cells are summed separately (row-major) and
/// subtracted last, so identical pixels under opposite signs cancel exactly.
fn apply_mask(img: &QuaternionImage, mask: &QuaternionMask, x: usize, y: usize) -> Quaternion {
    let mut pos = Quaternion::ZERO;
    let mut neg = Quaternion::ZERO;
    for row in 0..3 {
        for col in 0..3 {
            let s = mask.sign[row][col];
            if s == 0 {
                continue;
            }
            let f = *img.clamped(x as isize + col as isize - 1, y as isize + row as isize - 1);
            let term = mask.left[row][col] * f * mask.right[row][col];
            if s > 0 {
                pos = pos + term;
            } else {
                neg = neg + term;
            }
        }
    }
    (pos - neg).scale(mask.normalizer)
}

pub fn quaternion_convolve(img: &QuaternionImage, masks: &MaskPair) -> Result<ResponsePair> {
    if img.width() < 3 || img.height() < 3 {
        return Err(Error::invalid(format!(
            "quaternion filtering needs at least 3x3, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    let qh = Grid::from_fn(img.width(), img.height(), |x, y| {
        apply_mask(img, &masks.horizontal, x, y)
    });
    let qv = Grid::from_fn(img.width(), img.height(), |x, y| {
        apply_mask(img, &masks.vertical, x, y)
    });
    Ok(ResponsePair { qh, qv })
}

/// Per-pixel norm of the vector part of each response: `(q1, q2)`.
pub fn modulus_maps(resp: &ResponsePair) -> (MagnitudeMap, MagnitudeMap) {
    (
        resp.qh.map(|q| q.vector_norm()),
        resp.qv.map(|q| q.vector_norm()),
    )
}

pub fn combined_modulus(q1: &MagnitudeMap, q2: &MagnitudeMap) -> Result<MagnitudeMap> {
    if !q1.same_shape(q2) {
        return Err(Error::invalid("modulus maps differ in size"));
    }
    Ok(Grid::from_fn(q1.width(), q1.height(), |x, y| {
        q1.get(x, y).hypot(*q2.get(x, y))
    }))
}

/// Full quaternion stage: masks from `r`, convolution, combined modulus.
pub fn cec_magnitude(img: &QuaternionImage, r: &RotationOperator) -> Result<MagnitudeMap> {
    let resp = quaternion_convolve(img, &build_masks(r))?;
    let (q1, q2) = modulus_maps(&resp);
    combined_modulus(&q1, &q2)
}
