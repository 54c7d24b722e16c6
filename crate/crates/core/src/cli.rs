//! Command-line front end: argument parsing, config files, and the
//! `detect`, `batch`, `eval` and `convert-seg` commands.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 I/O or parse
//! error, 3 invalid image data, 4 partial failure in a multi-file run.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::baselines::{classic_canny, sobel_edges, DEFAULT_SOBEL_THRESHOLD};
use crate::bsds::{boundary_mask, load_image_list, load_manifest, parse_seg};
use crate::canny::{EdgeMap, HysteresisParams};
use crate::error::Error;
use crate::eval::{evaluate_manifest, evaluate_with, render_report, ReportFormat};
use crate::image::{Mask, RasterImage};
use crate::par;
use crate::pipeline::{run_pipeline, FusionRule, Intermediates, PipelineConfig, StageSelect};
use crate::pnm::{decode_pnm, encode_mask, encode_pgm, write_atomic, PgmScale};

pub const CONFIG_ENV: &str = "CEC_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Usage = 1,
    Io = 2,
    InvalidImage = 3,
    Partial = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub code: ExitCode,
    pub reason: String,
}

impl CliError {
    fn new(code: ExitCode, reason: impl Into<String>) -> Self {
        CliError {
            code,
            reason: reason.into(),
        }
    }

    fn usage(reason: impl Into<String>) -> Self {
        CliError::new(ExitCode::Usage, reason)
    }

    /// Single-line, machine-readable form for the error stream.
    pub fn line(&self) -> String {
        let kind = match self.code {
            ExitCode::Ok => "ok",
            ExitCode::Usage => "usage",
            ExitCode::Io => "io",
            ExitCode::InvalidImage => "invalid-image",
            ExitCode::Partial => "partial",
        };
        format!(
            "error: code={} kind={} reason={}",
            self.code as i32,
            kind,
            self.reason.replace(['\n', '\r'], " ")
        )
    }
}

/// Maps library errors onto the exit-code taxonomy.
fn classify(e: Error) -> CliError {
    let code = match &e {
        Error::InvalidArgument(_) | Error::Numeric(_) => ExitCode::InvalidImage,
        Error::Config(_) => ExitCode::Usage,
        Error::Pnm { .. } | Error::Seg { .. } | Error::Manifest { .. } | Error::Io(_) => ExitCode::Io,
    };
    CliError::new(code, e.to_string())
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::new(ExitCode::Io, format!("{}: {e}", path.display()))
}

#[derive(Parser, Debug)]
#[command(name = "cec", version, about = "Quaternion color edge detection and boundary evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Detect edges in one image and write a binary PGM.
    Detect {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        opts: DetectorOpts,
        /// Also write linear PGMs of each stage's magnitude map.
        #[arg(long)]
        emit_intermediates: bool,
    },
    /// Detect edges for every image listed in a manifest.
    Batch {
        manifest: PathBuf,
        out_dir: PathBuf,
        #[command(flatten)]
        opts: DetectorOpts,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Score predicted masks against ground truth.
    Eval {
        manifest: PathBuf,
        #[command(flatten)]
        opts: DetectorOpts,
        /// Manifest lists images; run the detector before scoring.
        #[arg(long)]
        detect_first: bool,
        #[arg(long)]
        tolerance: Option<usize>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Append the published comparison rows.
        #[arg(long)]
        reference: bool,
    },
    /// Convert a `.seg` segmentation into a binary boundary PGM.
    ConvertSeg { seg: PathBuf, output: PathBuf },
}

#[derive(Args, Debug, Default, Clone)]
pub struct DetectorOpts {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub high: Option<f64>,
    #[arg(long)]
    pub low: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_enum)]
    pub fusion: Option<FusionArg>,
    #[arg(long, value_enum)]
    pub stage: Option<StageArg>,
    #[arg(long, value_enum, default_value_t = DetectorArg::Cec)]
    pub detector: DetectorArg,
    #[arg(long)]
    pub sobel_threshold: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FusionArg {
    Max,
    Mean,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageArg {
    Cec,
    Pca,
    Fused,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DetectorArg {
    #[default]
    Cec,
    Sobel,
    Canny,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Csv,
    Json,
}

/// Values from a flat `key = value` config file. Every field is optional;
/// unset values fall back to detector defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CliConfig {
    pub high_frac: Option<f64>,
    pub low_frac: Option<f64>,
    pub sigma: Option<f64>,
    pub fusion_rule: Option<FusionRule>,
    pub pca_k: Option<usize>,
    pub stage_select: Option<StageSelect>,
    pub tolerance_r: Option<usize>,
    pub sobel_threshold_frac: Option<f64>,
}

impl CliConfig {
    pub fn parse(text: &str) -> Result<CliConfig, Error> {
        let mut cfg = CliConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Config(format!("expected 'key = value' at line {no}")))?;
            let bad = || Error::Config(format!("invalid value '{value}' for '{key}' at line {no}"));
            let real = || value.parse::<f64>().map_err(|_| bad());
            let int = || value.parse::<usize>().map_err(|_| bad());
            match key {
                "high_frac" => cfg.high_frac = Some(real()?),
                "low_frac" => cfg.low_frac = Some(real()?),
                "sigma" => cfg.sigma = Some(real()?),
                "sobel_threshold_frac" => cfg.sobel_threshold_frac = Some(real()?),
                "pca_k" => cfg.pca_k = Some(int()?),
                "tolerance_r" => cfg.tolerance_r = Some(int()?),
                "fusion_rule" => {
                    cfg.fusion_rule = Some(match value {
                        "max" => FusionRule::Max,
                        "mean" => FusionRule::Mean,
                        _ => return Err(bad()),
                    })
                }
                "stage_select" => {
                    cfg.stage_select = Some(match value {
                        "cec" | "cec_only" => StageSelect::CecOnly,
                        "pca" | "pca_only" => StageSelect::PcaOnly,
                        "fused" => StageSelect::Fused,
                        _ => return Err(bad()),
                    })
                }
                _ => return Err(Error::Config(format!("unknown key '{key}' at line {no}"))),
            }
        }
        Ok(cfg)
    }

    fn load(opts: &DetectorOpts) -> Result<CliConfig, CliError> {
        let path = opts
            .config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        let Some(path) = path else {
            return Ok(CliConfig::default());
        };
        let text = std::fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
        CliConfig::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    /// Command-line flags take precedence over file values.
    fn overlay(mut self, opts: &DetectorOpts) -> CliConfig {
        self.high_frac = opts.high.or(self.high_frac);
        self.low_frac = opts.low.or(self.low_frac);
        self.sigma = opts.sigma.or(self.sigma);
        self.sobel_threshold_frac = opts.sobel_threshold.or(self.sobel_threshold_frac);
        if let Some(f) = opts.fusion {
            self.fusion_rule = Some(match f {
                FusionArg::Max => FusionRule::Max,
                FusionArg::Mean => FusionRule::Mean,
            });
        }
        if let Some(s) = opts.stage {
            self.stage_select = Some(match s {
                StageArg::Cec => StageSelect::CecOnly,
                StageArg::Pca => StageSelect::PcaOnly,
                StageArg::Fused => StageSelect::Fused,
            });
        }
        self
    }
}

/// A fully configured edge detector.
#[derive(Clone, Debug, PartialEq)]
pub enum Detector {
    Cec(PipelineConfig),
    Sobel(f64),
    Canny(HysteresisParams),
}

impl Detector {
    pub fn from_config(kind: DetectorArg, cfg: &CliConfig) -> Result<Detector, Error> {
        let base = HysteresisParams::default();
        let params = |default_sigma: f64| -> Result<HysteresisParams, Error> {
            HysteresisParams::new(
                cfg.high_frac.unwrap_or(base.high_frac),
                cfg.low_frac.unwrap_or(base.low_frac),
                cfg.sigma.unwrap_or(default_sigma),
            )
        };
        let det = match kind {
            DetectorArg::Cec => {
                let defaults = PipelineConfig::default();
                let pc = PipelineConfig {
                    hysteresis: params(defaults.hysteresis.sigma)?,
                    fusion_rule: cfg.fusion_rule.unwrap_or(defaults.fusion_rule),
                    pca_k: cfg.pca_k.unwrap_or(defaults.pca_k),
                    stage_select: cfg.stage_select.unwrap_or(defaults.stage_select),
                };
                pc.validate()?;
                Detector::Cec(pc)
            }
            DetectorArg::Sobel => {
                let t = cfg.sobel_threshold_frac.unwrap_or(DEFAULT_SOBEL_THRESHOLD);
                if !(t > 0.0 && t <= 1.0) {
                    return Err(Error::invalid(format!("sobel threshold {t} outside (0, 1]")));
                }
                Detector::Sobel(t)
            }
            DetectorArg::Canny => Detector::Canny(params(base.sigma)?),
        };
        Ok(det)
    }

    pub fn detect(&self, img: &RasterImage) -> crate::Result<(EdgeMap, Option<Intermediates>)> {
        match self {
            Detector::Cec(cfg) => {
                let out = run_pipeline(&img.to_rgb(), cfg)?;
                Ok((out.edges, Some(out.intermediates)))
            }
            Detector::Sobel(t) => Ok((sobel_edges(img, *t)?, None)),
            Detector::Canny(p) => Ok((classic_canny(img, p)?, None)),
        }
    }

    pub fn detect_path(&self, path: &Path) -> Result<(EdgeMap, Option<Intermediates>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
        let img = decode_pnm(&bytes).map_err(|e| io_err(path, e))?;
        self.detect(&img).map_err(|e| {
            let mut ce = classify(e);
            ce.reason = format!("{}: {}", path.display(), ce.reason);
            ce
        })
    }
}

struct Resolved {
    detector: Detector,
    config: CliConfig,
}

fn resolve(opts: &DetectorOpts) -> Result<Resolved, CliError> {
    let config = CliConfig::load(opts)?.overlay(opts);
    let detector =
        Detector::from_config(opts.detector, &config).map_err(|e| CliError::usage(e.to_string()))?;
    Ok(Resolved { detector, config })
}

/// `edges.pgm` + `cec` → `edges.cec.pgm`.
pub fn intermediate_path(output: &Path, stage: &str) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "edges".into());
    output.with_file_name(format!("{stem}.{stage}.pgm"))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    write_atomic(path, bytes).map_err(|e| io_err(path, e))
}

pub fn cmd_detect(
    input: &Path,
    output: &Path,
    opts: &DetectorOpts,
    emit_intermediates: bool,
) -> Result<(), CliError> {
    let Resolved { detector, .. } = resolve(opts)?;
    let (edges, inter) = detector.detect_path(input)?;
    write(output, &encode_mask(&edges.mask))?;
    if emit_intermediates {
        match inter {
            Some(i) => {
                for (stage, map) in [("cec", &i.cec), ("pca", &i.pca), ("fused", &i.fused), ("nms", &i.nms)] {
                    write(&intermediate_path(output, stage), &encode_pgm(map, PgmScale::Linear))?;
                }
            }
            None => eprintln!("warning: detector has no intermediate maps"),
        }
    }
    Ok(())
}

pub fn batch_output_name(input: &Path) -> String {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into());
    format!("{stem}.edges.pgm")
}

pub fn cmd_batch(
    manifest: &Path,
    out_dir: &Path,
    opts: &DetectorOpts,
    jobs: Option<usize>,
) -> Result<(), CliError> {
    let Resolved { detector, .. } = resolve(opts)?;
    let images = load_image_list(manifest).map_err(classify)?;
    if images.is_empty() {
        eprintln!("warning: manifest {} lists no images", manifest.display());
        return Ok(());
    }
    std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let results = par::with_jobs(jobs.unwrap_or(0), || {
        par::map_slice(&images, |input| {
            let (edges, _) = detector.detect_path(input)?;
            let out = out_dir.join(batch_output_name(input));
            write(&out, &encode_mask(&edges.mask))?;
            Ok::<_, CliError>(out)
        })
    });
    let mut failed = 0;
    for (input, res) in images.iter().zip(results) {
        match res {
            Ok(out) => eprintln!("ok {} -> {}", input.display(), out.display()),
            Err(e) => {
                failed += 1;
                eprintln!("failed {}", e.line());
            }
        }
    }
    if failed > 0 {
        return Err(CliError::new(
            ExitCode::Partial,
            format!("{failed} of {} images failed", images.len()),
        ));
    }
    Ok(())
}

fn detect_mask(detector: &Detector, path: &Path) -> crate::Result<Mask> {
    let img = decode_pnm(&std::fs::read(path)?)?;
    Ok(detector.detect(&img)?.0.mask)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_eval(
    manifest: &Path,
    opts: &DetectorOpts,
    detect_first: bool,
    tolerance: Option<usize>,
    format: FormatArg,
    out: Option<&Path>,
    jobs: Option<usize>,
    reference: bool,
) -> Result<(), CliError> {
    let Resolved { detector, config } = resolve(opts)?;
    let pairs = load_manifest(manifest).map_err(classify)?;
    let tol = tolerance.or(config.tolerance_r).unwrap_or(0);
    let report = par::with_jobs(jobs.unwrap_or(0), || {
        if detect_first {
            evaluate_with(&pairs, tol, |p| detect_mask(&detector, p))
        } else {
            evaluate_manifest(&pairs, tol)
        }
    });
    let fmt = match format {
        FormatArg::Csv => ReportFormat::Csv,
        FormatArg::Json => ReportFormat::Json,
    };
    let text = render_report(&report, fmt, reference);
    match out {
        Some(p) => write(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    for row in &report.rows {
        if let Err(e) = &row.outcome {
            eprintln!("failed {}: {}", row.name, e.replace('\n', " "));
        }
    }
    if report.error_count() > 0 {
        return Err(CliError::new(
            ExitCode::Partial,
            format!("{} of {} pairs failed", report.error_count(), report.rows.len()),
        ));
    }
    Ok(())
}

pub fn cmd_convert_seg(seg: &Path, output: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(seg).map_err(|e| io_err(seg, e))?;
    let grid = parse_seg(&text).map_err(|e| io_err(seg, e))?;
    write(output, &encode_mask(&boundary_mask(&grid)))
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Detect {
            input,
            output,
            opts,
            emit_intermediates,
        } => cmd_detect(&input, &output, &opts, emit_intermediates),
        Command::Batch {
            manifest,
            out_dir,
            opts,
            jobs,
        } => cmd_batch(&manifest, &out_dir, &opts, jobs),
        Command::Eval {
            manifest,
            opts,
            detect_first,
            tolerance,
            format,
            out,
            jobs,
            reference,
        } => cmd_eval(
            &manifest,
            &opts,
            detect_first,
            tolerance,
            format,
            out.as_deref(),
            jobs,
            reference,
        ),
        Command::ConvertSeg { seg, output } => cmd_convert_seg(&seg, &output),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::Ok as i32;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", CliError::usage(first.trim_start_matches("error: ")).line());
            return ExitCode::Usage as i32;
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::Ok as i32,
        Err(e) => {
            eprintln!("{}", e.line());
            e.code as i32
        }
    }
}
