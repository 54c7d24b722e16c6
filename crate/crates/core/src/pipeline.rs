//! The CEC detector: a quaternion color stage and a
//! PCA-gradient stage run side by side, their normalized magnitudes are
//! fused, and the result is thinned and classified by hysteresis.

use crate::canny::{
    gaussian_smooth, hysteresis, non_max_suppress, sobel_gradients, EdgeMap, HysteresisParams,
};
use crate::cec::cec_magnitude;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::image::{to_quaternion_image, MagnitudeMap, RasterImage};
use crate::pca::{fit_pca, project};
use crate::quaternion::RotationOperator;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FusionRule {
    #[default]
    Max,
    Mean,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StageSelect {
    CecOnly,
    PcaOnly,
    #[default]
    Fused,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineConfig {
    pub hysteresis: HysteresisParams,
    pub fusion_rule: FusionRule,
    pub pca_k: usize,
    pub stage_select: StageSelect,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            // the quaternion masks already average three rows, so no blur
            hysteresis: HysteresisParams {
                sigma: 0.0,
                ..HysteresisParams::default()
            },
            fusion_rule: FusionRule::Max,
            pca_k: 1,
            stage_select: StageSelect::Fused,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.hysteresis.validate()?;
        if !(1..=3).contains(&self.pca_k) {
            return Err(Error::invalid(format!("pca_k {} outside 1..=3", self.pca_k)));
        }
        Ok(())
    }
}

/// Per-stage maps kept for export and inspection.
#[derive(Clone, Debug, PartialEq)]
pub struct Intermediates {
    pub cec: MagnitudeMap,
    pub pca: MagnitudeMap,
    /// Gradient direction of the PCA stage, used for thinning.
    pub direction: Grid<f64>,
    pub fused: MagnitudeMap,
    pub nms: MagnitudeMap,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOutput {
    pub edges: EdgeMap,
    pub intermediates: Intermediates,
}

/// Divides by the largest entry; an all-zero map is returned as is.
pub fn normalize_map(m: &MagnitudeMap) -> MagnitudeMap {
    let max = m.max_value();
    if max > 0.0 {
        m.map(|v| v / max)
    } else {
        m.clone()
    }
}

pub fn fuse(a: &MagnitudeMap, b: &MagnitudeMap, rule: FusionRule) -> Result<MagnitudeMap> {
    if !a.same_shape(b) {
        return Err(Error::invalid("fused maps differ in size"));
    }
    Ok(Grid::from_fn(a.width(), a.height(), |x, y| {
        let (u, v) = (*a.get(x, y), *b.get(x, y));
        match rule {
            FusionRule::Max => u.max(v),
            FusionRule::Mean => 0.5 * (u + v),
        }
    }))
}

/// Gradient magnitude over the first `k` principal channels and the
/// direction of the leading channel's gradient.
fn pca_stage(img: &RasterImage, k: usize, sigma: f64) -> Result<(MagnitudeMap, Grid<f64>)> {
    let model = fit_pca(img)?;
    let proj = project(img, &model, k)?;
    let mut magnitude: Option<MagnitudeMap> = None;
    let mut direction = None;
    for channel in &proj.coefficients {
        let field = sobel_gradients(&gaussian_smooth(channel, sigma)?)?;
        if direction.is_none() {
            direction = Some(field.direction);
        }
        magnitude = Some(match magnitude {
            None => field.magnitude,
            Some(acc) => Grid::from_fn(acc.width(), acc.height(), |x, y| {
                acc.get(x, y).hypot(*field.magnitude.get(x, y))
            }),
        });
    }
    Ok((
        magnitude.expect("k >= 1"),
        direction.expect("k >= 1"),
    ))
}

pub fn run_pipeline(img: &RasterImage, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    cfg.validate()?;
    if img.channels() != 3 {
        return Err(Error::invalid("the CEC detector needs a 3-channel image"));
    }
    img.check_filterable()?;

    let qimg = to_quaternion_image(img)?;
    let cec = cec_magnitude(&qimg, &RotationOperator::gray_half_turn())?;
    let (pca, direction) = pca_stage(img, cfg.pca_k, cfg.hysteresis.sigma)?;

    let fused = match cfg.stage_select {
        StageSelect::CecOnly => normalize_map(&cec),
        StageSelect::PcaOnly => normalize_map(&pca),
        StageSelect::Fused => fuse(&normalize_map(&cec), &normalize_map(&pca), cfg.fusion_rule)?,
    };
    let nms = non_max_suppress(&fused, &direction)?;
    let edges = hysteresis(&nms, &cfg.hysteresis)?;
    Ok(PipelineOutput {
        edges,
        intermediates: Intermediates {
            cec,
            pca,
            direction,
            fused,
            nms,
        },
    })
}
