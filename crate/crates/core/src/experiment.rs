//! The fixed-QP comparison protocol.
//!
//! Each GOP is first encoded at a single QP. Every frame's bits (rate mode)
//! or MS-SSIM (quality mode) then becomes the constraint for the descend on
//! the same frame. The two passes keep separate reference chains.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;

use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alloc::{
    estimate_qp0, fixed_qp_encode, mdd_quality, mdd_simplified, AllocTrace, MddConfig,
};
use crate::codec::{CodecConfig, CodecFrameSet, Frame, FrameMetric};
use crate::error::{Error, Result};
use crate::metrics::{fluctuation_stats, DistortionMap};
use crate::oracle::{mrd_audit, MrdReport};
use crate::rdcore::{DependentSourceSet, QpAssignment};
use crate::video::{gen_synthetic, ingest_yuv, Pattern, YuvFormat};

#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    Synthetic {
        pattern: Pattern,
        width: usize,
        height: usize,
        frames: usize,
        seed: u64,
    },
    File {
        path: PathBuf,
        width: usize,
        height: usize,
        frames: usize,
        format: YuvFormat,
    },
}

impl InputSpec {
    pub fn load(&self) -> Result<Vec<Frame>> {
        match self {
            InputSpec::Synthetic {
                pattern,
                width,
                height,
                frames,
                seed,
            } => gen_synthetic(*pattern, *width, *height, *frames, *seed),
            InputSpec::File {
                path,
                width,
                height,
                frames,
                format,
            } => ingest_yuv(path, *width, *height, *frames, *format),
        }
    }

    fn dims(&self) -> (usize, usize, usize) {
        match self {
            InputSpec::Synthetic {
                width,
                height,
                frames,
                ..
            }
            | InputSpec::File {
                width,
                height,
                frames,
                ..
            } => (*width, *height, *frames),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    FixedQp,
    MddRate,
    MddQuality,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-qp" => Ok(Mode::FixedQp),
            "mdd-rate" => Ok(Mode::MddRate),
            "mdd-quality" => Ok(Mode::MddQuality),
            _ => Err(Error::InvalidConfig(format!("unknown mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub input: InputSpec,
    pub gop_len: usize,
    pub mode: Mode,
    pub baseline_qp: u8,
    pub mdd: MddConfig,
    pub codec: CodecConfig,
    pub metric: FrameMetric,
    /// Keep the per-macroblock distortion map of every descend frame.
    pub keep_maps: bool,
    /// Random m.r.d. probes on the first frame; 0 disables the audit.
    pub audit_probes: usize,
    pub audit_seed: u64,
}

impl ExperimentSpec {
    pub fn new(input: InputSpec, mode: Mode) -> Self {
        ExperimentSpec {
            input,
            gop_len: 15,
            mode,
            baseline_qp: 30,
            mdd: MddConfig::default(),
            codec: CodecConfig::default(),
            metric: FrameMetric::default(),
            keep_maps: false,
            audit_probes: 0,
            audit_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (w, h, frames) = self.input.dims();
        if w == 0 || h == 0 || w % 16 != 0 || h % 16 != 0 {
            return Err(Error::FrameGeometry(format!(
                "{w}x{h} is not a positive multiple of 16"
            )));
        }
        if frames == 0 {
            return Err(Error::InvalidConfig(
                "at least one frame is required".into(),
            ));
        }
        if self.gop_len == 0 {
            return Err(Error::InvalidConfig("gop length must be at least 1".into()));
        }
        if !self.codec.qp_range.contains(self.baseline_qp) {
            return Err(Error::InvalidConfig(format!(
                "baseline qp {} outside qp range",
                self.baseline_qp
            )));
        }
        self.codec.validate()?;
        self.mdd.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameType {
    I,
    P,
}

/// What happened to a frame's descend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameFlag {
    Ok,
    /// Every source hit the QP floor.
    Saturated,
    /// Iteration cap reached.
    Capped,
    /// The constraint could not be posed; the baseline assignment was used.
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRow {
    pub frame: usize,
    pub frame_type: FrameType,
    pub base_bits: u64,
    pub base_ms_ssim: f64,
    pub base_stddev: f64,
    pub mdd_bits: u64,
    pub mdd_ms_ssim: f64,
    pub mdd_stddev: f64,
    pub qp0: u8,
    pub n_iter: usize,
    pub flag: FrameFlag,
}

/// Sequence statistics of the descend against the baseline.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Aggregates {
    pub frames: usize,
    /// Mean MS-SSIM difference.
    pub dq: f64,
    /// Relative bit saving.
    pub dr: f64,
    /// Relative reduction of the mean per-frame d_SSIM standard deviation.
    pub dv: f64,
    pub mean_iters: f64,
}

impl Aggregates {
    pub fn over<'a>(rows: impl IntoIterator<Item = &'a FrameRow>) -> Self {
        let rows: Vec<&FrameRow> = rows.into_iter().collect();
        if rows.is_empty() {
            return Aggregates::default();
        }
        let n = rows.len() as f64;
        let mean = |f: &dyn Fn(&FrameRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
        let base_bits: u64 = rows.iter().map(|r| r.base_bits).sum();
        let mdd_bits: u64 = rows.iter().map(|r| r.mdd_bits).sum();
        let base_sd = mean(&|r| r.base_stddev);
        Aggregates {
            frames: rows.len(),
            dq: mean(&|r| r.mdd_ms_ssim) - mean(&|r| r.base_ms_ssim),
            dr: if base_bits == 0 {
                0.0
            } else {
                (base_bits as f64 - mdd_bits as f64) / base_bits as f64
            },
            dv: if base_sd == 0.0 {
                0.0
            } else {
                (base_sd - mean(&|r| r.mdd_stddev)) / base_sd
            },
            mean_iters: mean(&|r| r.n_iter as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub mode: Mode,
    pub rows: Vec<FrameRow>,
    /// Descend distortion maps, one per frame, when requested.
    pub maps: Vec<DistortionMap>,
    pub traces: Vec<AllocTrace>,
    pub audit: Option<MrdReport>,
}

impl ExperimentReport {
    pub fn intra(&self) -> Aggregates {
        Aggregates::over(self.rows.iter().filter(|r| r.frame_type == FrameType::I))
    }

    pub fn all(&self) -> Aggregates {
        Aggregates::over(&self.rows)
    }

    pub fn flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.flag != FrameFlag::Ok).count()
    }
}

/// Runs both passes over every GOP of the input.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let frames = spec.input.load()?;
    let range = spec.codec.qp_range;
    let mut report = ExperimentReport {
        mode: spec.mode,
        rows: Vec::new(),
        maps: Vec::new(),
        traces: Vec::new(),
        audit: None,
    };
    for (g, gop) in frames.chunks(spec.gop_len).enumerate() {
        let base = fixed_qp_encode(gop, spec.baseline_qp, &spec.codec, spec.metric)?;
        let mut reference: Option<Frame> = None;
        for (j, frame) in gop.iter().enumerate() {
            let index = g * spec.gop_len + j;
            let b = &base[j].outcome;
            let b_q = b.frame_quality.ok_or(Error::QualityUnavailable)?;
            let set = CodecFrameSet::new(frame.clone(), reference.take(), spec.codec, spec.metric)?;
            if index == 0 && spec.audit_probes > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.audit_seed);
                let audit = mrd_audit(&set.clone().without_quality(), spec.audit_probes, &mut rng);
                info!("m.r.d. audit on frame 0: {audit}");
                report.audit = Some(audit);
            }
            let fallback = QpAssignment::uniform(set.n_sources(), spec.baseline_qp);
            let start = |qp: u8| qp.min(range.max.saturating_sub(spec.mdd.theta));
            let (qp0, attempt) = match spec.mode {
                Mode::FixedQp => (spec.baseline_qp, None),
                Mode::MddRate => {
                    let est = estimate_qp0(&set.clone().without_quality(), b.total_bits)?;
                    let qp0 = start(est.qp);
                    (
                        qp0,
                        Some(mdd_simplified(&set, b.total_bits, qp0, &spec.mdd)),
                    )
                }
                Mode::MddQuality => {
                    let qp0 = start(spec.baseline_qp);
                    (qp0, Some(mdd_quality(&set, b_q, qp0, &spec.mdd)))
                }
            };
            let (x, n_iter, flag) = match attempt {
                None => (fallback, 0, FrameFlag::Ok),
                Some(Ok((x, trace))) => {
                    let flag = if trace.saturated {
                        FrameFlag::Saturated
                    } else if trace.hit_cap {
                        FrameFlag::Capped
                    } else {
                        FrameFlag::Ok
                    };
                    if trace.monotonicity_violations > 0 {
                        info!(
                            "frame {index}: {} monotonicity violations",
                            trace.monotonicity_violations
                        );
                    }
                    let n = trace.n_iter;
                    report.traces.push(trace);
                    (x, n, flag)
                }
                Some(Err(e @ (Error::InfeasibleBudget { .. } | Error::InvalidConfig(_)))) => {
                    warn!("frame {index}: constraint not attainable ({e}); using the baseline assignment");
                    (fallback, 0, FrameFlag::Infeasible)
                }
                Some(Err(e)) => return Err(e),
            };
            let (enc, out) = set.encode_detailed(&x)?;
            report.rows.push(FrameRow {
                frame: index,
                frame_type: if j == 0 { FrameType::I } else { FrameType::P },
                base_bits: b.total_bits,
                base_ms_ssim: b_q,
                base_stddev: fluctuation_stats(&b.distortions()).stddev,
                mdd_bits: out.total_bits,
                mdd_ms_ssim: out.frame_quality.ok_or(Error::QualityUnavailable)?,
                mdd_stddev: fluctuation_stats(&out.distortions()).stddev,
                qp0,
                n_iter,
                flag,
            });
            if spec.keep_maps {
                report.maps.push(DistortionMap {
                    metric: set.metric(),
                    values: out.distortions(),
                });
            }
            reference = Some(enc.recon);
        }
    }
    Ok(report)
}

/// Per-frame rows under a header; an empty report yields the header alone.
pub fn write_csv<W: Write>(report: &ExperimentReport, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record([
        "frame",
        "frame_type",
        "base_bits",
        "base_ms_ssim",
        "base_stddev",
        "mdd_bits",
        "mdd_ms_ssim",
        "mdd_stddev",
        "qp0",
        "n_iter",
        "flag",
    ])?;
    for r in &report.rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<FrameRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// Plain-text summary: one line per scope with dQ (in 1e-4), dR, dV and
/// mean iterations.
pub fn print_summary(report: &ExperimentReport) -> String {
    let mut s = String::new();
    let mode = match report.mode {
        Mode::FixedQp => "fixed-qp",
        Mode::MddRate => "mdd-rate",
        Mode::MddQuality => "mdd-quality",
    };
    let _ = writeln!(s, "mode: {mode}");
    let _ = writeln!(
        s,
        "{:<6} {:>6} {:>10} {:>8} {:>8} {:>7}",
        "scope", "frames", "dQ(1e-4)", "dR", "dV", "N_iter"
    );
    for (name, a) in [("intra", report.intra()), ("all", report.all())] {
        let _ = writeln!(
            s,
            "{:<6} {:>6} {:>10.3} {:>7.2}% {:>7.2}% {:>7.2}",
            name,
            a.frames,
            a.dq * 1e4,
            a.dr * 100.0,
            a.dv * 100.0,
            a.mean_iters
        );
    }
    let _ = writeln!(s, "flagged frames: {}", report.flagged());
    if let Some(a) = &report.audit {
        let _ = writeln!(s, "m.r.d. audit: {a}");
    }
    s
}
