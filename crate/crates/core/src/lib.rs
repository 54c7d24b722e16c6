//! Color edge detection built on quaternion-rotation filters.
//!
//! The detector runs two stages over an RGB image: a hypercomplex
//! difference filter whose masks rotate every color vector about the gray
//! axis, and a Sobel gradient over the image's first principal color
//! component. Their normalized magnitudes are fused, thinned by non-maximum
//! suppression and classified with double-threshold hysteresis.
//!
//! Sobel and classical Canny baselines, a pixel-level evaluation harness and
//! a Berkeley `.seg` ground-truth reader are included for comparisons.
//!
//! Per-pixel work runs on rayon when the `parallel` feature is enabled (the
//! default); every result is identical with the feature off.

pub mod baselines;
pub mod bsds;
pub mod canny;
pub mod cec;
pub mod cli;
pub mod error;
pub mod eval;
pub mod grid;
pub mod image;
pub mod par;
pub mod pca;
pub mod pipeline;
pub mod pnm;
pub mod quaternion;

pub use baselines::{classic_canny, sobel_edges, BaselineKind};
pub use bsds::{boundary_mask, load_manifest, parse_seg, LabelGrid};
pub use canny::{EdgeLabel, EdgeMap, GradientField, HysteresisParams};
pub use cec::{build_masks, quaternion_convolve, MaskPair, ResponsePair};
pub use error::{Error, Result};
pub use eval::{confusion, metrics, ConfusionCounts, Metrics};
pub use grid::Grid;
pub use image::{GrayImage, MagnitudeMap, Mask, QuaternionImage, RasterImage};
pub use pca::{fit_pca, jacobi_eig, project, PcaModel};
pub use pipeline::{run_pipeline, FusionRule, PipelineConfig, PipelineOutput, StageSelect};
pub use quaternion::{Quaternion, RotationOperator};
