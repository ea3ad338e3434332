use crate::error::{Error, Result};

/// Macroblock edge length in samples.
pub const MB_SIZE: usize = 16;
/// Samples per macroblock, `K`.
pub const MB_PIXELS: usize = MB_SIZE * MB_SIZE;

/// An 8-bit luma raster whose dimensions are multiples of 16.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    width: usize,
    height: usize,
    luma: Vec<u8>,
}

impl Frame {
    pub fn new(width: usize, height: usize, luma: Vec<u8>) -> Result<Self> {
        if width == 0
            || height == 0
            || !width.is_multiple_of(MB_SIZE)
            || !height.is_multiple_of(MB_SIZE)
        {
            return Err(Error::FrameGeometry(format!(
                "{width}x{height} is not a positive multiple of {MB_SIZE}"
            )));
        }
        if luma.len() != width * height {
            return Err(Error::FrameGeometry(format!(
                "{} samples for a {width}x{height} frame",
                luma.len()
            )));
        }
        Ok(Frame {
            width,
            height,
            luma,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.luma
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.luma
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> u8 {
        self.luma[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.luma[y * self.width + x] = v;
    }

    pub fn grid(&self) -> MbGrid {
        MbGrid {
            mb_cols: self.width / MB_SIZE,
            mb_rows: self.height / MB_SIZE,
        }
    }

    pub fn same_size(&self, other: &Frame) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn check_same_size(&self, other: &Frame) -> Result<()> {
        if self.same_size(other) {
            Ok(())
        } else {
            Err(Error::FrameGeometry(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )))
        }
    }

    /// Copies out the 16x16 macroblock `mb` in raster order.
    pub fn mb_block(&self, mb: usize) -> [u8; MB_PIXELS] {
        let (x0, y0) = self.grid().origin(mb);
        let mut out = [0u8; MB_PIXELS];
        for y in 0..MB_SIZE {
            let row = (y0 + y) * self.width + x0;
            out[y * MB_SIZE..(y + 1) * MB_SIZE].copy_from_slice(&self.luma[row..row + MB_SIZE]);
        }
        out
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.luma.iter().map(|&v| v as f64).collect()
    }
}

/// Raster-order macroblock partition of a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MbGrid {
    pub mb_cols: usize,
    pub mb_rows: usize,
}

impl MbGrid {
    /// Number of macroblocks, `N`.
    pub fn len(&self) -> usize {
        self.mb_cols * self.mb_rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Top-left sample of macroblock `mb`.
    pub fn origin(&self, mb: usize) -> (usize, usize) {
        ((mb % self.mb_cols) * MB_SIZE, (mb / self.mb_cols) * MB_SIZE)
    }

    pub fn check(&self, mb: usize) -> Result<()> {
        if mb < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: mb,
                len: self.len(),
            })
        }
    }
}
