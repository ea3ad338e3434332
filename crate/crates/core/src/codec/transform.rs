//! 8x8 DCT, dead-zone scalar quantizer and zigzag scan.

use std::sync::OnceLock;

/// Quantizer step for a QP: `2^((qp - 4) / 6)`, never below 0.625.
pub fn qstep(qp: u8) -> f64 {
    (2f64.powf((qp as f64 - 4.0) / 6.0)).max(0.625)
}

/// Default dead-zone factor; the rounding offset is half of it.
pub const DEADZONE: f64 = 2.0 / 3.0;

pub fn quantize_with(coeffs: &[f64; 64], qp: u8, deadzone: f64) -> [i32; 64] {
    let step = qstep(qp);
    let offset = 0.5 * deadzone;
    let mut out = [0; 64];
    for (o, &c) in out.iter_mut().zip(coeffs) {
        let mag = (c.abs() / step + offset).floor() as i32;
        *o = if c < 0.0 { -mag } else { mag };
    }
    out
}

pub fn quantize(coeffs: &[f64; 64], qp: u8) -> [i32; 64] {
    quantize_with(coeffs, qp, DEADZONE)
}

pub fn dequantize(levels: &[i32; 64], qp: u8) -> [f64; 64] {
    let step = qstep(qp);
    let mut out = [0.0; 64];
    for (o, &l) in out.iter_mut().zip(levels) {
        *o = l as f64 * step;
    }
    out
}

fn basis() -> &'static [[f64; 8]; 8] {
    static B: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    B.get_or_init(|| {
        let mut b = [[0.0; 8]; 8];
        for (k, row) in b.iter_mut().enumerate() {
            let a = if k == 0 {
                (1.0f64 / 8.0).sqrt()
            } else {
                (2.0f64 / 8.0).sqrt()
            };
            for (n, v) in row.iter_mut().enumerate() {
                *v = a * ((2 * n + 1) as f64 * k as f64 * std::f64::consts::PI / 16.0).cos();
            }
        }
        b
    })
}

/// Orthonormal 2-D DCT-II of a row-major 8x8 block.
pub fn forward_dct(block: &[i32; 64]) -> [f64; 64] {
    let c = basis();
    let mut tmp = [0.0; 64];
    for y in 0..8 {
        for k in 0..8 {
            tmp[y * 8 + k] = (0..8).map(|n| c[k][n] * block[y * 8 + n] as f64).sum();
        }
    }
    let mut out = [0.0; 64];
    for k in 0..8 {
        for x in 0..8 {
            out[k * 8 + x] = (0..8).map(|n| c[k][n] * tmp[n * 8 + x]).sum();
        }
    }
    out
}

/// Inverse of [`forward_dct`], rounded to integers.
pub fn inverse_dct(coeffs: &[f64; 64]) -> [i32; 64] {
    let c = basis();
    let mut tmp = [0.0; 64];
    for k in 0..8 {
        for n in 0..8 {
            tmp[n * 8 + k] = (0..8).map(|j| c[j][n] * coeffs[j * 8 + k]).sum();
        }
    }
    let mut out = [0; 64];
    for y in 0..8 {
        for x in 0..8 {
            let v: f64 = (0..8).map(|j| c[j][x] * tmp[y * 8 + j]).sum();
            out[y * 8 + x] = v.round() as i32;
        }
    }
    out
}

/// Raster index of the i-th coefficient in zigzag order.
pub const ZIGZAG: [usize; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34, 27, 20,
    13, 6, 7, 14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51, 58, 59,
    52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
];
