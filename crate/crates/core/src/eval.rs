//! Pixel-level boundary evaluation.
//!
//! With tolerance `r > 0` a predicted pixel counts as a hit when it lies
//! within Chebyshev distance `r` of a ground-truth pixel, and a ground-truth
//! pixel is missed only when no prediction lies that close. Aggregates are
//! micro-averaged: counts are summed before ratios are taken.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bsds::{boundary_mask, parse_seg};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::image::{to_grayscale, Mask, RasterImage};
use crate::par;
use crate::pnm::decode_pnm;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

impl std::ops::Add for ConfusionCounts {
    type Output = ConfusionCounts;

    fn add(self, o: ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            tp: self.tp + o.tp,
            tn: self.tn + o.tn,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }
}

/// Ratios are `None` when their denominator is zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Metrics {
    pub accuracy: Option<f64>,
    pub specificity: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn metrics(c: &ConfusionCounts) -> Metrics {
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        // both defined but zero: no true positives at all
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    Metrics {
        accuracy: ratio(c.tp + c.tn, c.total()),
        specificity: ratio(c.tn, c.tn + c.fp),
        precision,
        recall,
        f1,
    }
}

/// Square (Chebyshev) dilation by radius `r`, computed separably.
pub fn dilate(mask: &Mask, r: usize) -> Mask {
    if r == 0 {
        return mask.clone();
    }
    let (w, h) = (mask.width(), mask.height());
    let rows = Grid::from_fn(w, h, |x, y| {
        (x.saturating_sub(r)..=(x + r).min(w - 1)).any(|sx| *mask.get(sx, y))
    });
    Grid::from_fn(w, h, |x, y| {
        (y.saturating_sub(r)..=(y + r).min(h - 1)).any(|sy| *rows.get(x, sy))
    })
}

pub fn confusion(pred: &Mask, gt: &Mask, tolerance_r: usize) -> Result<ConfusionCounts> {
    if !pred.same_shape(gt) {
        return Err(Error::invalid(format!(
            "prediction is {}x{} but ground truth is {}x{}",
            pred.width(),
            pred.height(),
            gt.width(),
            gt.height()
        )));
    }
    let total = pred.len() as u64;
    let positive = dilate(gt, tolerance_r);
    let reach = dilate(pred, tolerance_r);
    let mut c = ConfusionCounts::default();
    for i in 0..pred.len() {
        let p = pred.as_slice()[i];
        if p {
            if positive.as_slice()[i] {
                c.tp += 1;
            } else {
                c.fp += 1;
            }
        } else if gt.as_slice()[i] && !reach.as_slice()[i] {
            c.fn_ += 1;
        }
    }
    c.tn = total - c.tp - c.fp - c.fn_;
    Ok(c)
}

/// Reads a mask: PNM images are edges wherever the sample is nonzero;
/// `.seg` files are converted to their label boundaries.
pub fn load_mask(path: &Path) -> Result<Mask> {
    let is_seg = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("seg"));
    if is_seg {
        let text = std::fs::read_to_string(path)?;
        return Ok(boundary_mask(&parse_seg(&text)?));
    }
    let img = decode_pnm(&std::fs::read(path)?)?;
    Ok(mask_from_image(&img))
}

pub fn mask_from_image(img: &RasterImage) -> Mask {
    to_grayscale(img).map(|&v| v > 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub name: String,
    pub outcome: std::result::Result<(ConfusionCounts, Metrics), String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub aggregate: ConfusionCounts,
    pub aggregate_metrics: Metrics,
}

impl Report {
    pub fn error_count(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    pub fn from_rows(rows: Vec<ReportRow>) -> Report {
        let aggregate = rows
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok().map(|(c, _)| *c))
            .fold(ConfusionCounts::default(), |a, b| a + b);
        Report {
            aggregate_metrics: metrics(&aggregate),
            aggregate,
            rows,
        }
    }
}

pub fn row_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Evaluates every `(prediction, ground truth)` pair. Row order follows the
/// manifest; failing pairs become error rows and are left out of the aggregate.
pub fn evaluate_manifest(pairs: &[(PathBuf, PathBuf)], tolerance_r: usize) -> Report {
    evaluate_with(pairs, tolerance_r, load_mask)
}

/// Like [`evaluate_manifest`] but the prediction comes from `predict` applied
/// to the first path of each pair.
pub fn evaluate_with<F>(pairs: &[(PathBuf, PathBuf)], tolerance_r: usize, predict: F) -> Report
where
    F: Fn(&Path) -> Result<Mask> + Sync + Send,
{
    let rows = par::map_slice(pairs, |(pred_path, gt_path)| {
        let outcome = (|| {
            let pred = predict(pred_path)?;
            let gt = load_mask(gt_path)?;
            let c = confusion(&pred, &gt, tolerance_r)?;
            Ok::<_, Error>((c, metrics(&c)))
        })()
        .map_err(|e| e.to_string());
        ReportRow {
            name: row_name(pred_path),
            outcome,
        }
    });
    Report::from_rows(rows)
}

pub const CSV_HEADER: &str = "name,tp,tn,fp,fn,accuracy,specificity,precision,recall,f1";

/// Accuracy / specificity (percent) quoted for reference; never recomputed.
pub const REFERENCE_ROWS: [(&str, f64, f64); 6] = [
    ("Sobel", 87.8, 95.8),
    ("ERRNet", 86.8, 97.8),
    ("SASM", 94.0, 94.0),
    ("PiDiNet", 78.0, 86.0),
    ("LCD", 88.0, 93.0),
    ("CEC", 99.0, 98.0),
];

pub const REFERENCE_LABEL: &str = "quoted reference";

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(name: &str, c: Option<&ConfusionCounts>, m: &Metrics) -> String {
    let counts = match c {
        Some(c) => format!("{},{},{},{}", c.tp, c.tn, c.fp, c.fn_),
        None => ",,,".to_string(),
    };
    format!(
        "{},{},{},{},{},{},{}",
        csv_field(name),
        counts,
        fmt_opt(m.accuracy),
        fmt_opt(m.specificity),
        fmt_opt(m.precision),
        fmt_opt(m.recall),
        fmt_opt(m.f1)
    )
}

#[derive(Serialize)]
struct JsonRow<'a> {
    name: &'a str,
    tp: Option<u64>,
    tn: Option<u64>,
    fp: Option<u64>,
    #[serde(rename = "fn")]
    fn_: Option<u64>,
    accuracy: Option<f64>,
    specificity: Option<f64>,
    precision: Option<f64>,
    recall: Option<f64>,
    f1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

impl<'a> JsonRow<'a> {
    fn new(name: &'a str, c: Option<&ConfusionCounts>, m: &Metrics, error: Option<&'a str>) -> Self {
        JsonRow {
            name,
            tp: c.map(|c| c.tp),
            tn: c.map(|c| c.tn),
            fp: c.map(|c| c.fp),
            fn_: c.map(|c| c.fn_),
            accuracy: m.accuracy,
            specificity: m.specificity,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            error,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

pub const AGGREGATE_NAME: &str = "micro_average";

fn reference_metrics(acc: f64, spec: f64) -> Metrics {
    Metrics {
        accuracy: Some(acc / 100.0),
        specificity: Some(spec / 100.0),
        ..Metrics::default()
    }
}

/// Renders rows, then the aggregate, then (optionally) the reference rows.
/// Error rows carry empty counts and metrics.
pub fn render_report(report: &Report, format: ReportFormat, with_reference: bool) -> String {
    let mut out = String::new();
    let empty = Metrics::default();
    let reference: Vec<(String, Metrics)> = if with_reference {
        REFERENCE_ROWS
            .iter()
            .map(|(n, a, s)| (format!("{n} ({REFERENCE_LABEL})"), reference_metrics(*a, *s)))
            .collect()
    } else {
        Vec::new()
    };
    match format {
        ReportFormat::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for row in &report.rows {
                let line = match &row.outcome {
                    Ok((c, m)) => csv_line(&row.name, Some(c), m),
                    Err(_) => csv_line(&row.name, None, &empty),
                };
                out.push_str(&line);
                out.push('\n');
            }
            out.push_str(&csv_line(AGGREGATE_NAME, Some(&report.aggregate), &report.aggregate_metrics));
            out.push('\n');
            for (name, m) in &reference {
                out.push_str(&csv_line(name, None, m));
                out.push('\n');
            }
        }
        ReportFormat::Json => {
            let mut push = |row: JsonRow| {
                out.push_str(&serde_json::to_string(&row).expect("report rows serialize"));
                out.push('\n');
            };
            for row in &report.rows {
                push(match &row.outcome {
                    Ok((c, m)) => JsonRow::new(&row.name, Some(c), m, None),
                    Err(e) => JsonRow::new(&row.name, None, &empty, Some(e)),
                });
            }
            push(JsonRow::new(AGGREGATE_NAME, Some(&report.aggregate), &report.aggregate_metrics, None));
            for (name, m) in &reference {
                push(JsonRow::new(name, None, m, None));
            }
        }
    }
    out
}
