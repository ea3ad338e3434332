//! Multi-scale SSIM over dyadic 2x2-mean pyramids.

use super::ssim::{ssim_terms, SsimParams};
use crate::codec::Frame;
use crate::error::{Error, Result};

/// Standard per-scale exponents, finest first.
pub const MS_SSIM_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];

fn downsample(src: &[f64], w: usize, h: usize) -> (Vec<f64>, usize, usize) {
    let (nw, nh) = (w / 2, h / 2);
    let mut out = Vec::with_capacity(nw * nh);
    for y in 0..nh {
        for x in 0..nw {
            let i = 2 * y * w + 2 * x;
            out.push((src[i] + src[i + 1] + src[i + w] + src[i + w + 1]) / 4.0);
        }
    }
    (out, nw, nh)
}

/// Number of scales whose smallest side still fits the window (at most 5).
pub fn scale_count(width: usize, height: usize, window: usize) -> usize {
    let mut m = width.min(height);
    let mut s = 0;
    while s < MS_SSIM_WEIGHTS.len() && m >= window {
        s += 1;
        m /= 2;
    }
    s
}

pub fn ms_ssim_frame(original: &Frame, recon: &Frame) -> Result<f64> {
    ms_ssim_with(original, recon, &SsimParams::gaussian())
}

/// MS-SSIM with the exponents of the scales in use renormalised to sum to
/// one. Negative per-scale means are clamped to zero.
pub fn ms_ssim_with(original: &Frame, recon: &Frame, params: &SsimParams) -> Result<f64> {
    original.check_same_size(recon)?;
    let (mut w, mut h) = (original.width(), original.height());
    let scales = scale_count(w, h, params.window.size());
    if scales == 0 {
        return Err(Error::FrameGeometry(format!(
            "{w}x{h} is smaller than the SSIM window"
        )));
    }
    let wsum: f64 = MS_SSIM_WEIGHTS[..scales].iter().sum();
    let mut a = original.to_f64();
    let mut b = recon.to_f64();
    let mut score = 1.0;
    for (j, &weight) in MS_SSIM_WEIGHTS[..scales].iter().enumerate() {
        let t = ssim_terms(&a, &b, w, h, params);
        let n = (w * h) as f64;
        let term = if j + 1 == scales {
            t.luminance
                .iter()
                .zip(&t.contrast_structure)
                .map(|(l, c)| l * c)
                .sum::<f64>()
                / n
        } else {
            t.contrast_structure.iter().sum::<f64>() / n
        };
        score *= term.max(0.0).powf(weight / wsum);
        if j + 1 < scales {
            let (na, nw, nh) = downsample(&a, w, h);
            b = downsample(&b, w, h).0;
            a = na;
            w = nw;
            h = nh;
        }
    }
    Ok(score)
}
