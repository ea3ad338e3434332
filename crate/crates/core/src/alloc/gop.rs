//! GOP-level allocation and the fixed-QP baseline.

use log::info;

use super::{mdd_simplified, AllocTrace, MddConfig};
use crate::codec::{CodecConfig, CodecFrameSet, Frame, FrameMetric};
use crate::error::{Error, Result};
use crate::rdcore::{DependentSourceSet, EncodeOutcome, QpAssignment};

/// Splits `r_t` into one intra share of `intra_weight` units and one unit
/// per predicted frame. Rounding remainder goes to the intra frame, so the
/// budgets sum to `r_t` exactly.
pub fn frame_budget_split(r_t: u64, gop_len: usize, intra_weight: u64) -> Result<Vec<u64>> {
    if gop_len == 0 || intra_weight == 0 {
        return Err(Error::InvalidConfig(
            "gop length and intra weight must be at least 1".into(),
        ));
    }
    let p_frames = gop_len as u64 - 1;
    let unit = r_t / (intra_weight + p_frames);
    let mut out = vec![unit; gop_len];
    out[0] = r_t - unit * p_frames;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Qp0Estimate {
    pub qp: u8,
    /// Even `qp_max` exceeded the budget.
    pub overshoot: bool,
    pub probes: usize,
}

/// Smallest uniform QP whose encode fits in `r_c`, found by bisection over
/// trial encodes (assumes rate falls with uniform QP).
pub fn estimate_qp0<S: DependentSourceSet + ?Sized>(set: &S, r_c: u64) -> Result<Qp0Estimate> {
    if r_c == 0 {
        return Err(Error::InvalidConfig("rate budget must be positive".into()));
    }
    let range = set.qp_range();
    let n = set.n_sources();
    // search [min, max + 1]; max + 1 stands for "nothing fits"
    let (mut lo, mut hi) = (range.min as u16, range.max as u16 + 1);
    let mut probes = 0;
    while lo < hi {
        let mid = (lo + hi) / 2;
        probes += 1;
        if set.encode(&QpAssignment::uniform(n, mid as u8)).total_bits <= r_c {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let overshoot = lo > range.max as u16;
    Ok(Qp0Estimate {
        qp: if overshoot { range.max } else { lo as u8 },
        overshoot,
        probes,
    })
}

/// One frame of a GOP encode.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameEncode {
    pub assignment: QpAssignment,
    pub outcome: EncodeOutcome,
    pub recon: Frame,
}

/// Encodes every macroblock of every frame at `qp`; frame 0 intra, each
/// later frame predicted from the previous reconstruction.
pub fn fixed_qp_encode(
    gop: &[Frame],
    qp: u8,
    codec: &CodecConfig,
    metric: FrameMetric,
) -> Result<Vec<FrameEncode>> {
    if !codec.qp_range.contains(qp) {
        return Err(Error::QpOutOfRange {
            index: 0,
            qp,
            min: codec.qp_range.min,
            max: codec.qp_range.max,
        });
    }
    let mut out: Vec<FrameEncode> = Vec::with_capacity(gop.len());
    for frame in gop {
        let reference = out.last().map(|f| f.recon.clone());
        let set = CodecFrameSet::new(frame.clone(), reference, *codec, metric)?;
        let x = QpAssignment::uniform(set.n_sources(), qp);
        let (enc, outcome) = set.encode_detailed(&x)?;
        out.push(FrameEncode {
            assignment: x,
            outcome,
            recon: enc.recon,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GopOptions {
    pub codec: CodecConfig,
    pub metric: FrameMetric,
    pub intra_weight: u64,
}

impl Default for GopOptions {
    fn default() -> Self {
        GopOptions {
            codec: CodecConfig::default(),
            metric: FrameMetric::default(),
            intra_weight: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GopFrameAllocation {
    pub budget: u64,
    pub qp0: Qp0Estimate,
    pub encode: FrameEncode,
    pub trace: AllocTrace,
}

/// Splits `r_t` over the GOP and runs the simplified descend frame by
/// frame, each predicted frame referencing the previous result.
///
/// Leftover bits are not carried forward, so the total is at most `r_t`.
pub fn mb_mdd(
    gop: &[Frame],
    r_t: u64,
    cfg: &MddConfig,
    opts: &GopOptions,
) -> Result<Vec<GopFrameAllocation>> {
    let budgets = frame_budget_split(r_t, gop.len(), opts.intra_weight)?;
    let mut out: Vec<GopFrameAllocation> = Vec::with_capacity(gop.len());
    for (j, (frame, &budget)) in gop.iter().zip(&budgets).enumerate() {
        let reference = out.last().map(|f| f.encode.recon.clone());
        let set = CodecFrameSet::new(frame.clone(), reference, opts.codec, opts.metric)?;
        let qp0 = estimate_qp0(&set.clone().without_quality(), budget)?;
        if qp0.overshoot {
            return Err(Error::InfeasibleBudget {
                budget,
                minimum: set
                    .encode(&QpAssignment::uniform(
                        set.n_sources(),
                        opts.codec.qp_range.max,
                    ))
                    .total_bits,
            });
        }
        let start = qp0
            .qp
            .min(opts.codec.qp_range.max.saturating_sub(cfg.theta));
        let (x, trace) = mdd_simplified(&set, budget, start, cfg)?;
        let (enc, outcome) = set.encode_detailed(&x)?;
        info!(
            "frame {j}: budget {budget}, qp0 {}, {} bits, {} iterations",
            qp0.qp, outcome.total_bits, trace.n_iter
        );
        out.push(GopFrameAllocation {
            budget,
            qp0,
            encode: FrameEncode {
                assignment: x,
                outcome,
                recon: enc.recon,
            },
            trace,
        });
    }
    Ok(out)
}
