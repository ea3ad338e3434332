use super::bits::{BitReader, BitWriter};
use super::entropy::{coded_block_pattern, rate_of_mb, read_mb, write_mb, MbLevels};
use super::frame::{Frame, MB_PIXELS, MB_SIZE};
use super::motion::motion_search;
use super::predict::{
    available_intra, inter_predict, intra_predict, sad, IntraMode, MbMode, MotionVector,
};
use super::transform::{dequantize, forward_dct, inverse_dct, quantize_with};
use super::CodecConfig;
use crate::error::{Error, Result};
use crate::rdcore::QpAssignment;

/// What the encoder decided for one macroblock.
#[derive(Debug, Clone, PartialEq)]
pub struct MbEncodeRecord {
    pub mode: MbMode,
    pub qp: u8,
    /// Header, motion vector and residual bits.
    pub rate_bits: u64,
    pub recon: [u8; MB_PIXELS],
}

#[derive(Debug, Clone)]
pub struct EncodedFrame {
    pub records: Vec<MbEncodeRecord>,
    pub recon: Frame,
    pub bitstream: Vec<u8>,
    pub bit_len: u64,
}

impl EncodedFrame {
    pub fn total_bits(&self) -> u64 {
        self.records.iter().map(|r| r.rate_bits).sum()
    }
}

/// Best full-search vector per macroblock. It depends only on the original
/// frame and the reference, never on the QP assignment.
pub fn estimate_motion(frame: &Frame, reference: &Frame, range: i32) -> Vec<(MotionVector, u32)> {
    let grid = frame.grid();
    (0..grid.len())
        .map(|mb| motion_search(&frame.mb_block(mb), reference, grid.origin(mb), range))
        .collect()
}

fn block_offset(b: usize) -> usize {
    (b / 2) * 8 * MB_SIZE + (b % 2) * 8
}

/// Adds the decoded residual to `pred` and writes the result into `recon`.
pub(crate) fn reconstruct_mb(
    recon: &mut Frame,
    x0: usize,
    y0: usize,
    pred: &[u8; MB_PIXELS],
    levels: &MbLevels,
    qp: u8,
) -> [u8; MB_PIXELS] {
    let mut out = *pred;
    for (b, block) in levels.iter().enumerate() {
        if block.iter().all(|&l| l == 0) {
            continue;
        }
        let res = inverse_dct(&dequantize(block, qp));
        let off = block_offset(b);
        for y in 0..8 {
            for x in 0..8 {
                let i = off + y * MB_SIZE + x;
                out[i] = (pred[i] as i32 + res[y * 8 + x]).clamp(0, 255) as u8;
            }
        }
    }
    for y in 0..MB_SIZE {
        let row = (y0 + y) * recon.width() + x0;
        recon.data_mut()[row..row + MB_SIZE].copy_from_slice(&out[y * MB_SIZE..(y + 1) * MB_SIZE]);
    }
    out
}

fn transform_quantize(
    orig: &[u8; MB_PIXELS],
    pred: &[u8; MB_PIXELS],
    qp: u8,
    deadzone: f64,
) -> MbLevels {
    let mut levels = [[0i32; 64]; 4];
    for (b, out) in levels.iter_mut().enumerate() {
        let off = block_offset(b);
        let mut res = [0i32; 64];
        for y in 0..8 {
            for x in 0..8 {
                let i = off + y * MB_SIZE + x;
                res[y * 8 + x] = orig[i] as i32 - pred[i] as i32;
            }
        }
        if res.iter().all(|&r| r == 0) {
            continue;
        }
        *out = quantize_with(&forward_dct(&res), qp, deadzone);
    }
    levels
}

/// Encodes with a precomputed motion field (see [`estimate_motion`]).
pub fn encode_with_motion(
    frame: &Frame,
    reference: Option<&Frame>,
    motion: Option<&[(MotionVector, u32)]>,
    x: &QpAssignment,
    cfg: &CodecConfig,
) -> Result<EncodedFrame> {
    let grid = frame.grid();
    x.validate(grid.len(), cfg.qp_range)?;
    if let Some(r) = reference {
        frame.check_same_size(r)?;
    }
    let mut recon = Frame::filled(frame.width(), frame.height(), 0)?;
    let mut records = Vec::with_capacity(grid.len());
    let mut w = BitWriter::new();
    let mut last_qp = cfg.initial_qp;
    for mb in 0..grid.len() {
        let (x0, y0) = grid.origin(mb);
        let orig = frame.mb_block(mb);
        // Mode decision: minimum SAD, first candidate wins ties.
        let mut best: Option<(MbMode, [u8; MB_PIXELS], u32)> = None;
        for m in available_intra(x0, y0) {
            let p = intra_predict(&recon, x0, y0, m);
            let s = sad(&orig, &p);
            if best.as_ref().is_none_or(|b| s < b.2) {
                best = Some((MbMode::Intra(m), p, s));
            }
        }
        if let (Some(r), Some(mvs)) = (reference, motion) {
            let (mv, s) = mvs[mb];
            if best.as_ref().is_none_or(|b| s < b.2) {
                best = Some((MbMode::Inter(mv), inter_predict(r, x0, y0, mv), s));
            }
        }
        let (mode, pred, _) = best.expect("DC is always available");
        let qp = x[mb];
        let levels = transform_quantize(&orig, &pred, qp, cfg.deadzone);
        let delta = qp as i32 - last_qp as i32;
        if coded_block_pattern(&levels) != 0 {
            last_qp = qp;
        }
        let before = w.len();
        write_mb(&mut w, &levels, mode, delta);
        let rate_bits = w.len() - before;
        debug_assert_eq!(rate_bits, rate_of_mb(&levels, mode, delta));
        let rec = reconstruct_mb(&mut recon, x0, y0, &pred, &levels, qp);
        records.push(MbEncodeRecord {
            mode,
            qp,
            rate_bits,
            recon: rec,
        });
    }
    let bit_len = w.len();
    Ok(EncodedFrame {
        records,
        recon,
        bitstream: w.into_bytes(),
        bit_len,
    })
}

/// Encodes one frame in raster order. `reference` present means an inter
/// frame: every macroblock may use the full-search vector or an intra mode.
pub fn encode_frame(
    frame: &Frame,
    reference: Option<&Frame>,
    x: &QpAssignment,
    cfg: &CodecConfig,
) -> Result<EncodedFrame> {
    cfg.validate()?;
    let motion = match reference {
        Some(r) => {
            frame.check_same_size(r)?;
            Some(estimate_motion(frame, r, cfg.search_range))
        }
        None => None,
    };
    encode_with_motion(frame, reference, motion.as_deref(), x, cfg)
}

/// Reconstructs a frame from its bitstream alone.
pub fn decode_frame(
    bitstream: &[u8],
    bit_len: u64,
    width: usize,
    height: usize,
    reference: Option<&Frame>,
    cfg: &CodecConfig,
) -> Result<Frame> {
    let mut recon = Frame::filled(width, height, 0)?;
    if let Some(r) = reference {
        recon.check_same_size(r)?;
    }
    let grid = recon.grid();
    let mut r = BitReader::new(bitstream, bit_len);
    let mut qp = cfg.initial_qp as i32;
    for mb in 0..grid.len() {
        let (x0, y0) = grid.origin(mb);
        let parsed = read_mb(&mut r)?;
        if let Some(d) = parsed.qp_delta {
            qp += d;
            if qp < cfg.qp_range.min as i32 || qp > cfg.qp_range.max as i32 {
                return Err(Error::Bitstream(format!("qp {qp} out of range at mb {mb}")));
            }
        }
        let pred = match parsed.mode {
            MbMode::Intra(m) => {
                let ok = match m {
                    IntraMode::Dc => true,
                    IntraMode::Horizontal => x0 > 0,
                    IntraMode::Vertical => y0 > 0,
                };
                if !ok {
                    return Err(Error::Bitstream(format!(
                        "unavailable intra mode at mb {mb}"
                    )));
                }
                intra_predict(&recon, x0, y0, m)
            }
            MbMode::Inter(mv) => {
                let reference = reference.ok_or(Error::MissingReference)?;
                let rx = x0 as i32 + mv.dx;
                let ry = y0 as i32 + mv.dy;
                if rx < 0
                    || ry < 0
                    || rx as usize + MB_SIZE > width
                    || ry as usize + MB_SIZE > height
                {
                    return Err(Error::Bitstream(format!(
                        "motion vector leaves frame at mb {mb}"
                    )));
                }
                inter_predict(reference, x0, y0, mv)
            }
        };
        reconstruct_mb(&mut recon, x0, y0, &pred, &parsed.levels, qp as u8);
    }
    if r.position() != bit_len {
        return Err(Error::Bitstream(
            "trailing bits after last macroblock".into(),
        ));
    }
    Ok(recon)
}
