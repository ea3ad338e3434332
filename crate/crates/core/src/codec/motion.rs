//! Full-search integer-pel block matching.

use super::frame::{Frame, MB_PIXELS, MB_SIZE};
use super::predict::MotionVector;

/// Exhaustive SAD search of `block` around `center` (top-left of the
/// co-located block) within `±range`, clipped so the candidate stays inside
/// `reference`. Ties go to the smallest `|dx| + |dy|`, then raster order.
pub fn motion_search(
    block: &[u8; MB_PIXELS],
    reference: &Frame,
    center: (usize, usize),
    range: i32,
) -> (MotionVector, u32) {
    let (cx, cy) = (center.0 as i32, center.1 as i32);
    let max_x = (reference.width() - MB_SIZE) as i32;
    let max_y = (reference.height() - MB_SIZE) as i32;
    let w = reference.width();
    let data = reference.data();
    let mut best = (MotionVector::default(), u32::MAX);
    for dy in -range..=range {
        let ry = cy + dy;
        if ry < 0 || ry > max_y {
            continue;
        }
        for dx in -range..=range {
            let rx = cx + dx;
            if rx < 0 || rx > max_x {
                continue;
            }
            let mut sad = 0u32;
            for y in 0..MB_SIZE {
                let row = (ry as usize + y) * w + rx as usize;
                let cand = &data[row..row + MB_SIZE];
                let cur = &block[y * MB_SIZE..(y + 1) * MB_SIZE];
                sad += cand
                    .iter()
                    .zip(cur)
                    .map(|(&a, &b)| (a as i32 - b as i32).unsigned_abs())
                    .sum::<u32>();
                if sad > best.1 {
                    break;
                }
            }
            let mv = MotionVector { dx, dy };
            if sad < best.1 || (sad == best.1 && mv.l1() < best.0.l1()) {
                best = (mv, sad);
            }
        }
    }
    best
}
