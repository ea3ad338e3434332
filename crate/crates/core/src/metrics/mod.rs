//! Distortion and quality measurement.

mod msssim;
mod ssim;

pub use msssim::{ms_ssim_frame, ms_ssim_with, scale_count, MS_SSIM_WEIGHTS};
pub use ssim::{d_ssim_mb, ssim_pixel_map, SsimMap, SsimParams, SsimWindow};

use std::io::Write;

use crate::codec::{Frame, MB_PIXELS, MB_SIZE};
use crate::error::Result;
use crate::rdcore::DistortionMetric;

/// `(1/K) * sum (x - y)^2` over the 256 pixels of macroblock `mb`.
pub fn mse_mb(original: &Frame, recon: &Frame, mb: usize) -> Result<f64> {
    original.check_same_size(recon)?;
    let grid = original.grid();
    grid.check(mb)?;
    let (x0, y0) = grid.origin(mb);
    let mut sum = 0u64;
    for y in y0..y0 + MB_SIZE {
        for x in x0..x0 + MB_SIZE {
            let d = original.at(x, y) as i64 - recon.at(x, y) as i64;
            sum += (d * d) as u64;
        }
    }
    Ok(sum as f64 / MB_PIXELS as f64)
}

/// Per-macroblock distortion of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionMap {
    pub metric: DistortionMetric,
    pub values: Vec<f64>,
}

impl DistortionMap {
    pub fn mse(original: &Frame, recon: &Frame) -> Result<Self> {
        let values = (0..original.grid().len())
            .map(|mb| mse_mb(original, recon, mb))
            .collect::<Result<_>>()?;
        Ok(DistortionMap {
            metric: DistortionMetric::Mse,
            values,
        })
    }

    pub fn ssim(original: &Frame, recon: &Frame, params: &SsimParams) -> Result<Self> {
        let map = ssim_pixel_map(original, recon, params)?;
        let values = (0..map.grid().len())
            .map(|mb| d_ssim_mb(&map, mb))
            .collect::<Result<_>>()?;
        Ok(DistortionMap {
            metric: DistortionMetric::Ssim,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn stats(&self) -> FluctuationStats {
        fluctuation_stats(&self.values)
    }

    /// `mb_index,value` rows under a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["mb_index", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            w.serialize((i, v))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationStats {
    /// `V_d`: max minus min.
    pub range: f64,
    /// Population standard deviation.
    pub stddev: f64,
}

pub fn fluctuation_stats(values: &[f64]) -> FluctuationStats {
    if values.is_empty() {
        return FluctuationStats {
            range: 0.0,
            stddev: 0.0,
        };
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    FluctuationStats {
        range: crate::rdcore::fluctuation(values.iter().copied()),
        stddev: var.sqrt(),
    }
}

#[cfg(test)]
mod tests;
