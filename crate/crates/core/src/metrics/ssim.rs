//! Per-pixel SSIM with a sliding window clipped at the frame border.

use crate::codec::{Frame, MbGrid, MB_PIXELS, MB_SIZE};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SsimWindow {
    /// `size x size` box.
    Uniform(usize),
    /// `size x size` Gaussian with standard deviation `sigma`.
    Gaussian { size: usize, sigma: f64 },
}

impl SsimWindow {
    pub fn size(&self) -> usize {
        match *self {
            SsimWindow::Uniform(s) => s,
            SsimWindow::Gaussian { size, .. } => size,
        }
    }

    /// Offset of the first tap relative to the centre pixel.
    pub fn start(&self) -> isize {
        -((self.size() as isize - 1) / 2)
    }

    /// One-dimensional taps; the 2-D window is their outer product.
    pub fn taps(&self) -> Vec<f64> {
        match *self {
            SsimWindow::Uniform(s) => vec![1.0; s],
            SsimWindow::Gaussian { size, sigma } => {
                let start = self.start();
                let raw: Vec<f64> = (0..size)
                    .map(|k| {
                        let d = (start + k as isize) as f64;
                        (-d * d / (2.0 * sigma * sigma)).exp()
                    })
                    .collect();
                let sum: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / sum).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParams {
    pub window: SsimWindow,
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
}

impl SsimParams {
    /// 11x11 Gaussian, sigma 1.5.
    pub fn gaussian() -> Self {
        SsimParams {
            window: SsimWindow::Gaussian {
                size: 11,
                sigma: 1.5,
            },
            ..Self::default()
        }
    }

    pub fn c1(&self) -> f64 {
        (self.k1 * self.dynamic_range).powi(2)
    }

    pub fn c2(&self) -> f64 {
        (self.k2 * self.dynamic_range).powi(2)
    }
}

impl Default for SsimParams {
    /// 8x8 uniform window, K1 = 0.01, K2 = 0.03, L = 255.
    fn default() -> Self {
        SsimParams {
            window: SsimWindow::Uniform(8),
            k1: 0.01,
            k2: 0.03,
            dynamic_range: 255.0,
        }
    }
}

/// Luminance and contrast-structure terms at every pixel.
pub(crate) struct SsimTerms {
    pub luminance: Vec<f64>,
    pub contrast_structure: Vec<f64>,
}

/// Moments are taken about mid-grey: less cancellation in the variances, and
/// box-window sums stay exact.
const SHIFT: f64 = 128.0;

/// Weighted local means, variances and covariance, windows clipped and
/// renormalised at the border.
pub(crate) fn ssim_terms(
    a: &[f64],
    b: &[f64],
    width: usize,
    height: usize,
    params: &SsimParams,
) -> SsimTerms {
    let taps = params.window.taps();
    let start = params.window.start();
    let n = width * height;
    // horizontal pass: a, b, a^2, b^2, ab
    let mut h = vec![[0.0f64; 5]; n];
    let mut wx = vec![0.0f64; width];
    for (x, wsum) in wx.iter_mut().enumerate() {
        for (k, &t) in taps.iter().enumerate() {
            let xx = x as isize + start + k as isize;
            if xx >= 0 && (xx as usize) < width {
                *wsum += t;
            }
        }
    }
    for y in 0..height {
        let row = y * width;
        for x in 0..width {
            let mut acc = [0.0f64; 5];
            for (k, &t) in taps.iter().enumerate() {
                let xx = x as isize + start + k as isize;
                if xx < 0 || xx as usize >= width {
                    continue;
                }
                let (va, vb) = (a[row + xx as usize] - SHIFT, b[row + xx as usize] - SHIFT);
                acc[0] += t * va;
                acc[1] += t * vb;
                acc[2] += t * (va * va);
                acc[3] += t * (vb * vb);
                acc[4] += t * (va * vb);
            }
            h[row + x] = acc;
        }
    }
    let (c1, c2) = (params.c1(), params.c2());
    let mut luminance = vec![0.0; n];
    let mut contrast_structure = vec![0.0; n];
    for y in 0..height {
        let mut wy = 0.0;
        for (k, &t) in taps.iter().enumerate() {
            let yy = y as isize + start + k as isize;
            if yy >= 0 && (yy as usize) < height {
                wy += t;
            }
        }
        for x in 0..width {
            let mut acc = [0.0f64; 5];
            for (k, &t) in taps.iter().enumerate() {
                let yy = y as isize + start + k as isize;
                if yy < 0 || yy as usize >= height {
                    continue;
                }
                let src = &h[yy as usize * width + x];
                for c in 0..5 {
                    acc[c] += t * src[c];
                }
            }
            let norm = wx[x] * wy;
            let (ma, mb) = (acc[0] / norm, acc[1] / norm);
            let va = acc[2] / norm - ma * ma;
            let vb = acc[3] / norm - mb * mb;
            let cov = acc[4] / norm - ma * mb;
            let (ma, mb) = (ma + SHIFT, mb + SHIFT);
            let i = y * width + x;
            luminance[i] = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
            contrast_structure[i] = (2.0 * cov + c2) / (va + vb + c2);
        }
    }
    SsimTerms {
        luminance,
        contrast_structure,
    }
}

/// Per-pixel SSIM values of a frame pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SsimMap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl SsimMap {
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn grid(&self) -> MbGrid {
        MbGrid {
            mb_cols: self.width / MB_SIZE,
            mb_rows: self.height / MB_SIZE,
        }
    }
}

pub fn ssim_pixel_map(original: &Frame, recon: &Frame, params: &SsimParams) -> Result<SsimMap> {
    original.check_same_size(recon)?;
    let (w, h) = (original.width(), original.height());
    let t = ssim_terms(&original.to_f64(), &recon.to_f64(), w, h, params);
    let values = t
        .luminance
        .iter()
        .zip(&t.contrast_structure)
        .map(|(l, cs)| l * cs)
        .collect();
    Ok(SsimMap {
        width: w,
        height: h,
        values,
    })
}

/// `1 - mean SSIM` over the 256 pixels of macroblock `mb`. The windows of
/// pixels near the MB edge reach into neighbouring macroblocks.
pub fn d_ssim_mb(map: &SsimMap, mb: usize) -> Result<f64> {
    let grid = map.grid();
    grid.check(mb)?;
    let (x0, y0) = grid.origin(mb);
    let mut sum = 0.0;
    for y in y0..y0 + MB_SIZE {
        for x in x0..x0 + MB_SIZE {
            sum += map.at(x, y);
        }
    }
    Ok(1.0 - sum / MB_PIXELS as f64)
}
