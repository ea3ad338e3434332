//! A small deterministic block-transform codec.
//!
//! Luma only, 16x16 macroblocks in raster order, each split into four 8x8
//! DCT blocks. Intra prediction (DC, horizontal, vertical) reads the
//! reconstructed left and top neighbours; inter prediction uses one
//! full-search integer motion vector into the previous reconstruction.
//! Every macroblock is serialized, so rates are exact bit counts.
//!
//! Per-macroblock syntax:
//!
//! | field      | bits                        | present            |
//! |------------|-----------------------------|--------------------|
//! | mode       | 2 (DC, H, V, inter)         | always             |
//! | mv dx, dy  | 5 + 5, two's complement     | inter              |
//! | cbp        | 4, one flag per 8x8 block   | always             |
//! | qp delta   | se(v) against last sent QP  | cbp != 0           |
//! | per block  | ue(nnz-1), then ue(run) se(level) pairs in zigzag order | flag set |
//!
//! A macroblock without residual therefore costs 6 bits intra and 16 bits inter.

mod bits;
mod encoder;
mod entropy;
mod frame;
mod motion;
mod predict;
mod set;
mod transform;

pub use bits::{se_len, ue_len, BitReader, BitWriter};
pub use encoder::{
    decode_frame, encode_frame, encode_with_motion, estimate_motion, EncodedFrame, MbEncodeRecord,
};
pub use entropy::{rate_of_mb, MbLevels, CBP_BITS, MODE_BITS, MV_COMPONENT_BITS};
pub use frame::{Frame, MbGrid, MB_PIXELS, MB_SIZE};
pub use motion::motion_search;
pub use predict::{inter_predict, intra_predict, sad, IntraMode, MbMode, MotionVector};
pub use set::{CodecFrameSet, FrameMetric};
pub use transform::{
    dequantize, forward_dct, inverse_dct, qstep, quantize, quantize_with, DEADZONE, ZIGZAG,
};

use crate::error::{Error, Result};
use crate::rdcore::QpRange;

/// Largest search range whose vectors fit the 5-bit component code.
pub const MAX_SEARCH_RANGE: i32 = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodecConfig {
    pub qp_range: QpRange,
    pub deadzone: f64,
    /// Motion search window, `±search_range` integer samples.
    pub search_range: i32,
    /// QP the first `qp_delta` of a frame is relative to.
    pub initial_qp: u8,
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig {
            qp_range: QpRange::default(),
            deadzone: DEADZONE,
            search_range: 8,
            initial_qp: 26,
        }
    }
}

impl CodecConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.deadzone > 0.0 && self.deadzone < 2.0) {
            return Err(Error::InvalidConfig(format!(
                "deadzone {} not in (0, 2)",
                self.deadzone
            )));
        }
        if !(0..=MAX_SEARCH_RANGE).contains(&self.search_range) {
            return Err(Error::InvalidConfig(format!(
                "search range {} not in 0..={MAX_SEARCH_RANGE}",
                self.search_range
            )));
        }
        if !self.qp_range.contains(self.initial_qp) {
            return Err(Error::InvalidConfig(format!(
                "initial qp {} outside qp range",
                self.initial_qp
            )));
        }
        Ok(())
    }
}
