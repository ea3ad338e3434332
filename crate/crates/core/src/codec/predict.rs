//! Intra prediction of a whole macroblock from its reconstructed left (A)
//! and top (B) neighbours.

use super::frame::{Frame, MB_PIXELS, MB_SIZE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntraMode {
    Dc,
    Horizontal,
    Vertical,
}

/// Integer-pel displacement into the reference frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MotionVector {
    pub dx: i32,
    pub dy: i32,
}

impl MotionVector {
    pub fn l1(&self) -> i32 {
        self.dx.abs() + self.dy.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MbMode {
    Intra(IntraMode),
    Inter(MotionVector),
}

impl MbMode {
    pub(crate) fn code(&self) -> u32 {
        match self {
            MbMode::Intra(IntraMode::Dc) => 0,
            MbMode::Intra(IntraMode::Horizontal) => 1,
            MbMode::Intra(IntraMode::Vertical) => 2,
            MbMode::Inter(_) => 3,
        }
    }
}

/// Which intra modes have their neighbours available at `(x0, y0)`.
pub fn available_intra(x0: usize, y0: usize) -> impl Iterator<Item = IntraMode> {
    let mut modes = vec![IntraMode::Dc];
    if x0 > 0 {
        modes.push(IntraMode::Horizontal);
    }
    if y0 > 0 {
        modes.push(IntraMode::Vertical);
    }
    modes.into_iter()
}

/// Builds the prediction for the macroblock at `(x0, y0)` from samples of
/// `recon` that precede it in raster order.
pub fn intra_predict(recon: &Frame, x0: usize, y0: usize, mode: IntraMode) -> [u8; MB_PIXELS] {
    let top = |i: usize| recon.at(x0 + i, y0 - 1);
    let left = |i: usize| recon.at(x0 - 1, y0 + i);
    let mut out = [0u8; MB_PIXELS];
    match mode {
        IntraMode::Dc => {
            let has_top = y0 > 0;
            let has_left = x0 > 0;
            let sum_top: u32 = if has_top {
                (0..MB_SIZE).map(|i| top(i) as u32).sum()
            } else {
                0
            };
            let sum_left: u32 = if has_left {
                (0..MB_SIZE).map(|i| left(i) as u32).sum()
            } else {
                0
            };
            let dc = match (has_top, has_left) {
                (true, true) => (sum_top + sum_left + 16) >> 5,
                (true, false) => (sum_top + 8) >> 4,
                (false, true) => (sum_left + 8) >> 4,
                (false, false) => 128,
            };
            out.fill(dc as u8);
        }
        IntraMode::Horizontal => {
            for y in 0..MB_SIZE {
                out[y * MB_SIZE..(y + 1) * MB_SIZE].fill(left(y));
            }
        }
        IntraMode::Vertical => {
            for y in 0..MB_SIZE {
                for x in 0..MB_SIZE {
                    out[y * MB_SIZE + x] = top(x);
                }
            }
        }
    }
    out
}

/// Motion-compensated prediction; the displaced block must lie inside `reference`.
pub fn inter_predict(reference: &Frame, x0: usize, y0: usize, mv: MotionVector) -> [u8; MB_PIXELS] {
    let rx = (x0 as i32 + mv.dx) as usize;
    let ry = (y0 as i32 + mv.dy) as usize;
    let mut out = [0u8; MB_PIXELS];
    for y in 0..MB_SIZE {
        let row = (ry + y) * reference.width() + rx;
        out[y * MB_SIZE..(y + 1) * MB_SIZE].copy_from_slice(&reference.data()[row..row + MB_SIZE]);
    }
    out
}

pub fn sad(a: &[u8; MB_PIXELS], b: &[u8; MB_PIXELS]) -> u32 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x as i32 - y as i32).unsigned_abs())
        .sum()
}
