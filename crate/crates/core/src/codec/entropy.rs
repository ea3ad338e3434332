//! Macroblock syntax and its exact bit cost.
//!
//! Layout per macroblock:
//!
//! ```text
//! mode         2 bits   (0 DC, 1 horizontal, 2 vertical, 3 inter)
//! mv.dx, mv.dy 5 bits each, two's complement (inter only)
//! cbp          4 bits   (one flag per 8x8 block, raster order)
//! qp_delta     se(v)    (only when cbp != 0, relative to the last signalled qp)
//! per coded block: ue(nonzeros - 1), then per nonzero in zigzag order ue(run) se(level)
//! ```

use super::bits::{se_len, ue_len, BitReader, BitWriter};
use super::predict::{IntraMode, MbMode, MotionVector};
use super::transform::ZIGZAG;
use crate::error::{Error, Result};

pub const MODE_BITS: u32 = 2;
pub const CBP_BITS: u32 = 4;
pub const MV_COMPONENT_BITS: u32 = 5;

/// Quantized levels of the four 8x8 blocks of a macroblock.
pub type MbLevels = [[i32; 64]; 4];

/// Fixed-length part of the header: mode, motion vector, cbp.
pub fn header_bits(mode: MbMode) -> u64 {
    let mv = if matches!(mode, MbMode::Inter(_)) {
        2 * MV_COMPONENT_BITS
    } else {
        0
    };
    (MODE_BITS + mv + CBP_BITS) as u64
}

pub fn coded_block_pattern(levels: &MbLevels) -> u32 {
    levels
        .iter()
        .enumerate()
        .filter(|(_, b)| b.iter().any(|&l| l != 0))
        .fold(0, |acc, (i, _)| acc | (1 << (3 - i)))
}

fn run_level_pairs(block: &[i32; 64]) -> impl Iterator<Item = (u32, i32)> + '_ {
    let mut run = 0u32;
    ZIGZAG.iter().filter_map(move |&pos| {
        let l = block[pos];
        if l == 0 {
            run += 1;
            None
        } else {
            let r = run;
            run = 0;
            Some((r, l))
        }
    })
}

/// Bits spent on one 8x8 block's residual (0 when it is not coded).
pub fn block_bits(block: &[i32; 64]) -> u64 {
    let pairs: Vec<_> = run_level_pairs(block).collect();
    if pairs.is_empty() {
        return 0;
    }
    ue_len(pairs.len() as u32 - 1)
        + pairs
            .iter()
            .map(|&(r, l)| ue_len(r) + se_len(l))
            .sum::<u64>()
}

/// Exact bit count of a macroblock as [`write_mb`] would emit it.
pub fn rate_of_mb(levels: &MbLevels, mode: MbMode, qp_delta: i32) -> u64 {
    let mut bits = header_bits(mode);
    if coded_block_pattern(levels) != 0 {
        bits += se_len(qp_delta) + levels.iter().map(block_bits).sum::<u64>();
    }
    bits
}

pub fn write_mb(w: &mut BitWriter, levels: &MbLevels, mode: MbMode, qp_delta: i32) {
    w.put_bits(mode.code(), MODE_BITS);
    if let MbMode::Inter(mv) = mode {
        w.put_bits(mv.dx as u32 & 0x1f, MV_COMPONENT_BITS);
        w.put_bits(mv.dy as u32 & 0x1f, MV_COMPONENT_BITS);
    }
    let cbp = coded_block_pattern(levels);
    w.put_bits(cbp, CBP_BITS);
    if cbp == 0 {
        return;
    }
    w.put_se(qp_delta);
    for block in levels.iter() {
        let pairs: Vec<_> = run_level_pairs(block).collect();
        if pairs.is_empty() {
            continue;
        }
        w.put_ue(pairs.len() as u32 - 1);
        for (run, level) in pairs {
            w.put_ue(run);
            w.put_se(level);
        }
    }
}

pub struct ParsedMb {
    pub mode: MbMode,
    pub qp_delta: Option<i32>,
    pub levels: MbLevels,
}

fn sign_extend5(v: u32) -> i32 {
    ((v << 27) as i32) >> 27
}

pub fn read_mb(r: &mut BitReader<'_>) -> Result<ParsedMb> {
    let mode = match r.get_bits(MODE_BITS)? {
        0 => MbMode::Intra(IntraMode::Dc),
        1 => MbMode::Intra(IntraMode::Horizontal),
        2 => MbMode::Intra(IntraMode::Vertical),
        _ => {
            let dx = sign_extend5(r.get_bits(MV_COMPONENT_BITS)?);
            let dy = sign_extend5(r.get_bits(MV_COMPONENT_BITS)?);
            MbMode::Inter(MotionVector { dx, dy })
        }
    };
    let cbp = r.get_bits(CBP_BITS)?;
    let mut levels = [[0i32; 64]; 4];
    if cbp == 0 {
        return Ok(ParsedMb {
            mode,
            qp_delta: None,
            levels,
        });
    }
    let qp_delta = r.get_se()?;
    for (i, block) in levels.iter_mut().enumerate() {
        if cbp & (1 << (3 - i)) == 0 {
            continue;
        }
        let count = r.get_ue()? as usize + 1;
        let mut pos = 0usize;
        for _ in 0..count {
            pos += r.get_ue()? as usize;
            if pos >= 64 {
                return Err(Error::Bitstream("run past end of block".into()));
            }
            let level = r.get_se()?;
            if level == 0 {
                return Err(Error::Bitstream("zero level in run-level pair".into()));
            }
            block[ZIGZAG[pos]] = level;
            pos += 1;
        }
    }
    Ok(ParsedMb {
        mode,
        qp_delta: Some(qp_delta),
        levels,
    })
}
