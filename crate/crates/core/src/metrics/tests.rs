use super::*;
use crate::video::{gen_synthetic, Pattern};

fn noise(w: usize, h: usize, seed: u64) -> Frame {
    gen_synthetic(Pattern::Noise, w, h, 1, seed)
        .unwrap()
        .remove(0)
}

fn offset(f: &Frame, by: i32) -> Frame {
    let data = f
        .data()
        .iter()
        .map(|&v| (v as i32 + by).clamp(0, 255) as u8)
        .collect();
    Frame::new(f.width(), f.height(), data).unwrap()
}

#[test]
fn mse_analytic_cases() {
    let a = Frame::filled(32, 32, 100).unwrap();
    assert_eq!(mse_mb(&a, &a, 3).unwrap(), 0.0);
    assert_eq!(mse_mb(&a, &offset(&a, 1), 2).unwrap(), 1.0);
    assert!(mse_mb(&a, &a, 4).is_err());
}

#[test]
fn mse_is_local() {
    let a = noise(48, 48, 1);
    let mut b = a.clone();
    let before = mse_mb(&a, &b, 4).unwrap();
    // scribble over MB 0 and MB 8
    for y in 0..16 {
        for x in 0..16 {
            b.set(x, y, 0);
            b.set(x + 32, y + 32, 255);
        }
    }
    assert_eq!(mse_mb(&a, &b, 4).unwrap(), before);
}

#[test]
fn ssim_identical_and_constant() {
    let a = noise(32, 32, 2);
    for params in [SsimParams::default(), SsimParams::gaussian()] {
        let m = ssim_pixel_map(&a, &a, &params).unwrap();
        assert!(m.values.iter().all(|&v| v == 1.0));
        let c = Frame::filled(32, 32, 128).unwrap();
        let m = ssim_pixel_map(&c, &c, &params).unwrap();
        assert!(m.values.iter().all(|&v| v == 1.0));
        for mb in 0..4 {
            assert_eq!(d_ssim_mb(&m, mb).unwrap(), 0.0);
        }
    }
}

#[test]
fn ssim_values_in_range() {
    let a = noise(32, 32, 3);
    let b = noise(32, 32, 4);
    let m = ssim_pixel_map(&a, &b, &SsimParams::default()).unwrap();
    assert!(m.values.iter().all(|v| (-1.0..=1.0).contains(v)));
    for mb in 0..4 {
        let d = d_ssim_mb(&m, mb).unwrap();
        assert!((0.0..=2.0).contains(&d));
    }
}

#[test]
fn neighbour_perturbation_changes_d_ssim() {
    let a = noise(48, 48, 5);
    let mut b = a.clone();
    let base = DistortionMap::ssim(&a, &b, &SsimParams::default()).unwrap();
    // distort only the centre MB (index 4)
    for y in 16..32 {
        for x in 16..32 {
            let v = b.at(x, y);
            b.set(x, y, v.wrapping_add(40));
        }
    }
    let after = DistortionMap::ssim(&a, &b, &SsimParams::default()).unwrap();
    for mb in [1, 3, 5, 7] {
        assert!(after.values[mb] != base.values[mb], "mb {mb} unaffected");
    }
    assert!(after.values[4] > 0.0);
    // MSE of the same neighbours is untouched
    for mb in [1, 3, 5, 7] {
        assert_eq!(mse_mb(&a, &b, mb).unwrap(), 0.0);
    }
}

#[test]
fn fluctuation_analytic() {
    let s = fluctuation_stats(&[0.5, 0.5, 0.5]);
    assert_eq!((s.range, s.stddev), (0.0, 0.0));
    let s = fluctuation_stats(&[0.1, 0.3]);
    assert!((s.range - 0.2).abs() < 1e-15);
    assert!((s.stddev - 0.1).abs() < 1e-15);
}

#[test]
fn ms_ssim_identity_symmetry_and_scales() {
    let a = noise(64, 48, 6);
    let b = offset(&noise(64, 48, 6), 3);
    assert_eq!(ms_ssim_frame(&a, &a).unwrap(), 1.0);
    let ab = ms_ssim_frame(&a, &b).unwrap();
    let ba = ms_ssim_frame(&b, &a).unwrap();
    assert_eq!(ab, ba);
    assert!(ab < 1.0 && ab > 0.0);
    assert_eq!(scale_count(352, 288, 11), 5);
    assert_eq!(scale_count(176, 176, 11), 5);
    assert_eq!(scale_count(64, 48, 11), 3);
    assert_eq!(scale_count(16, 16, 11), 1);
    let tiny = Frame::filled(16, 16, 3).unwrap();
    assert_eq!(ms_ssim_frame(&tiny, &tiny).unwrap(), 1.0);
    let big = SsimParams {
        window: SsimWindow::Uniform(17),
        ..SsimParams::default()
    };
    assert!(ms_ssim_with(&tiny, &tiny, &big).is_err());
}

fn box_blur(f: &Frame, radius: i32) -> Frame {
    let (w, h) = (f.width() as i32, f.height() as i32);
    let mut out = f.clone();
    for y in 0..h {
        for x in 0..w {
            let (mut s, mut n) = (0u32, 0u32);
            for dy in -radius..=radius {
                for dx in -radius..=radius {
                    let (xx, yy) = (x + dx, y + dy);
                    if xx >= 0 && yy >= 0 && xx < w && yy < h {
                        s += f.at(xx as usize, yy as usize) as u32;
                        n += 1;
                    }
                }
            }
            out.set(x as usize, y as usize, ((s + n / 2) / n) as u8);
        }
    }
    out
}

#[test]
fn ms_ssim_orders_blur_strength() {
    let a = gen_synthetic(Pattern::Checkerboard, 176, 176, 1, 0)
        .unwrap()
        .remove(0);
    let a = {
        // add texture so blur matters at every scale
        let n = noise(176, 176, 7);
        let d = a
            .data()
            .iter()
            .zip(n.data())
            .map(|(&x, &y)| ((x as u32 + y as u32) / 2) as u8)
            .collect();
        Frame::new(176, 176, d).unwrap()
    };
    let mild = ms_ssim_frame(&a, &box_blur(&a, 1)).unwrap();
    let heavy = ms_ssim_frame(&a, &box_blur(&a, 3)).unwrap();
    assert!(mild > heavy, "{mild} vs {heavy}");
}

#[test]
fn distortion_map_csv() {
    let m = DistortionMap {
        metric: DistortionMetric::Ssim,
        values: vec![0.25, 0.5],
    };
    let mut buf = Vec::new();
    m.write_csv(&mut buf).unwrap();
    assert_eq!(
        String::from_utf8(buf).unwrap(),
        "mb_index,value\n0,0.25\n1,0.5\n"
    );
}
