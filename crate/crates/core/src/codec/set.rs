//! One frame of the codec exposed as a [`DependentSourceSet`].

use super::encoder::{encode_with_motion, estimate_motion, EncodedFrame};
use super::frame::Frame;
use super::predict::MotionVector;
use super::CodecConfig;
use crate::error::Result;
use crate::metrics::{d_ssim_mb, ms_ssim_frame, mse_mb, ssim_pixel_map, SsimParams};
use crate::rdcore::{
    DependentSourceSet, DistortionMetric, EncodeOutcome, QpAssignment, QpRange, SourceOutcome,
};

/// Per-macroblock distortion reported by a [`CodecFrameSet`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameMetric {
    Ssim(SsimParams),
    Mse,
}

impl Default for FrameMetric {
    fn default() -> Self {
        FrameMetric::Ssim(SsimParams::default())
    }
}

/// A frame, its optional reference, and everything needed to encode it under
/// any assignment. The motion field does not depend on QPs, so it is
/// computed once here.
#[derive(Debug, Clone)]
pub struct CodecFrameSet {
    frame: Frame,
    reference: Option<Frame>,
    cfg: CodecConfig,
    metric: FrameMetric,
    motion: Option<Vec<(MotionVector, u32)>>,
    with_quality: bool,
}

impl CodecFrameSet {
    pub fn new(
        frame: Frame,
        reference: Option<Frame>,
        cfg: CodecConfig,
        metric: FrameMetric,
    ) -> Result<Self> {
        cfg.validate()?;
        let motion = match &reference {
            Some(r) => {
                frame.check_same_size(r)?;
                Some(estimate_motion(&frame, r, cfg.search_range))
            }
            None => None,
        };
        Ok(CodecFrameSet {
            frame,
            reference,
            cfg,
            metric,
            motion,
            with_quality: true,
        })
    }

    pub fn intra(frame: Frame, cfg: CodecConfig) -> Result<Self> {
        Self::new(frame, None, cfg, FrameMetric::default())
    }

    /// Skips the MS-SSIM computation on every encode; `frame_quality` is then absent.
    pub fn without_quality(mut self) -> Self {
        self.with_quality = false;
        self
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn reference(&self) -> Option<&Frame> {
        self.reference.as_ref()
    }

    pub fn config(&self) -> &CodecConfig {
        &self.cfg
    }

    /// Full encode returning the bitstream and reconstruction alongside the outcome.
    pub fn encode_detailed(&self, x: &QpAssignment) -> Result<(EncodedFrame, EncodeOutcome)> {
        let enc = encode_with_motion(
            &self.frame,
            self.reference.as_ref(),
            self.motion.as_deref(),
            x,
            &self.cfg,
        )?;
        let distortions: Vec<f64> = match &self.metric {
            FrameMetric::Ssim(p) => {
                let map = ssim_pixel_map(&self.frame, &enc.recon, p)?;
                (0..enc.records.len())
                    .map(|mb| d_ssim_mb(&map, mb))
                    .collect::<Result<_>>()?
            }
            FrameMetric::Mse => (0..enc.records.len())
                .map(|mb| mse_mb(&self.frame, &enc.recon, mb))
                .collect::<Result<_>>()?,
        };
        let per_source = enc
            .records
            .iter()
            .zip(distortions)
            .map(|(r, d)| SourceOutcome {
                rate_bits: r.rate_bits,
                distortion: d.max(0.0),
            })
            .collect();
        let quality = if self.with_quality {
            Some(ms_ssim_frame(&self.frame, &enc.recon)?)
        } else {
            None
        };
        Ok((enc, EncodeOutcome::new(per_source, quality)))
    }
}

impl DependentSourceSet for CodecFrameSet {
    fn n_sources(&self) -> usize {
        self.frame.grid().len()
    }

    fn qp_range(&self) -> QpRange {
        self.cfg.qp_range
    }

    fn metric(&self) -> DistortionMetric {
        match self.metric {
            FrameMetric::Ssim(_) => DistortionMetric::Ssim,
            FrameMetric::Mse => DistortionMetric::Mse,
        }
    }

    fn encode(&self, x: &QpAssignment) -> EncodeOutcome {
        self.encode_detailed(x)
            .expect("assignment validated and frame geometry checked at construction")
            .1
    }
}
