//! Morphology and smooth blending on rectangular cell grids.
//!
//! Distances are Euclidean in physical units (cell spacing may differ per
//! axis). Cells outside the rectangle copy the nearest edge cell, so a
//! uniform mask stays uniform under every operation.

use crate::error::{Error, Result};
use crate::grid::KRect;

/// `(1 - |u|²)⁴` on the unit disc.
pub fn bump(u2: f64) -> f64 {
    if u2 >= 1.0 {
        0.0
    } else {
        (1.0 - u2).powi(4)
    }
}

/// Offsets `(di, dj, |offset|² / radius²)` of the closed disc of `radius`.
fn disc(spacing: [f64; 2], radius: f64) -> Vec<(isize, isize, f64)> {
    let ri = (radius / spacing[0]).floor() as isize;
    let rj = (radius / spacing[1]).floor() as isize;
    let mut out = Vec::new();
    for di in -ri..=ri {
        for dj in -rj..=rj {
            let d2 = (di as f64 * spacing[0]).powi(2) + (dj as f64 * spacing[1]).powi(2);
            if d2 <= radius * radius * (1.0 + 1e-12) {
                out.push((di, dj, d2 / (radius * radius)));
            }
        }
    }
    out
}

fn clamp(i: isize, n: usize) -> usize {
    i.clamp(0, n as isize - 1) as usize
}

/// Cells whose closed `radius`-disc lies entirely in `mask`.
pub fn erode(rect: &KRect, mask: &[bool], radius: f64) -> Vec<bool> {
    let d = disc(rect.spacing, radius);
    let [n0, n1] = rect.n;
    let mut out = vec![false; mask.len()];
    for i in 0..n0 {
        for j in 0..n1 {
            out[i * n1 + j] = d.iter().all(|&(di, dj, _)| {
                mask[clamp(i as isize + di, n0) * n1 + clamp(j as isize + dj, n1)]
            });
        }
    }
    out
}

/// Cells within `radius` of some cell of `mask`.
pub fn dilate(rect: &KRect, mask: &[bool], radius: f64) -> Vec<bool> {
    let d = disc(rect.spacing, radius);
    let [n0, n1] = rect.n;
    let mut out = vec![false; mask.len()];
    for i in 0..n0 {
        for j in 0..n1 {
            out[i * n1 + j] = d.iter().any(|&(di, dj, _)| {
                mask[clamp(i as isize + di, n0) * n1 + clamp(j as isize + dj, n1)]
            });
        }
    }
    out
}

/// Convolution of an indicator with the unit-mass bump of `radius`.
/// Cells whose whole disc is inside the set get exactly 1, cells whose disc
/// misses it get exactly 0.
pub fn mollify(rect: &KRect, mask: &[bool], radius: f64) -> Result<Vec<f64>> {
    let min_spacing = rect.spacing[0].min(rect.spacing[1]);
    if !(radius >= min_spacing) {
        return Err(Error::BlendWidth { width: radius, spacing: min_spacing });
    }
    let d: Vec<(isize, isize, f64)> = disc(rect.spacing, radius)
        .into_iter()
        .map(|(a, b, u2)| (a, b, bump(u2)))
        .filter(|t| t.2 > 0.0)
        .collect();
    let total: f64 = d.iter().map(|t| t.2).sum();
    let [n0, n1] = rect.n;
    let mut out = vec![0.0; mask.len()];
    for i in 0..n0 {
        for j in 0..n1 {
            let mut acc = 0.0;
            let mut all = true;
            let mut any = false;
            for &(di, dj, w) in &d {
                if mask[clamp(i as isize + di, n0) * n1 + clamp(j as isize + dj, n1)] {
                    acc += w;
                    any = true;
                } else {
                    all = false;
                }
            }
            out[i * n1 + j] = if all {
                1.0
            } else if !any {
                0.0
            } else {
                (acc / total).clamp(0.0, 1.0)
            };
        }
    }
    Ok(out)
}

/// Largest one-axis difference quotient of order `m` (1..=4) of a cell field.
pub fn max_difference(rect: &KRect, field: &[f64], m: usize) -> f64 {
    const STENCILS: [&[f64]; 4] = [&[-1.0, 1.0], &[1.0, -2.0, 1.0], &[-1.0, 3.0, -3.0, 1.0], &[1.0, -4.0, 6.0, -4.0, 1.0]];
    let st = STENCILS[m - 1];
    let [n0, n1] = rect.n;
    let mut worst = 0.0f64;
    for axis in 0..2 {
        let h = rect.spacing[axis].powi(m as i32);
        let (len, other) = if axis == 0 { (n0, n1) } else { (n1, n0) };
        if len < st.len() {
            continue;
        }
        for o in 0..other {
            for s in 0..=len - st.len() {
                let mut acc = 0.0;
                for (t, c) in st.iter().enumerate() {
                    let idx = if axis == 0 { (s + t) * n1 + o } else { o * n1 + s + t };
                    acc += c * field[idx];
                }
                worst = worst.max((acc / h).abs());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(n: usize) -> KRect {
        KRect::spanning([0.0, 0.0], [n as f64, n as f64], [n, n]).unwrap()
    }

    #[test]
    fn uniform_masks_are_fixed_points() {
        let r = rect(12);
        let all = vec![true; 144];
        assert!(erode(&r, &all, 3.0).iter().all(|b| *b));
        assert!(mollify(&r, &all, 3.0).unwrap().iter().all(|v| *v == 1.0));
        let none = vec![false; 144];
        assert!(!dilate(&r, &none, 3.0).iter().any(|b| *b));
        assert!(mollify(&r, &none, 3.0).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn erosion_and_dilation_are_nested() {
        let r = rect(20);
        let mask: Vec<bool> = (0..400).map(|c| (c / 20) < 10).collect();
        let e = erode(&r, &mask, 2.0);
        let d = dilate(&r, &mask, 2.0);
        for c in 0..400 {
            assert!(!e[c] || mask[c]);
            assert!(!mask[c] || d[c]);
        }
        // half plane i < 10: eroded keeps i < 8, dilated reaches i < 12
        assert!(e[7 * 20 + 5] && !e[8 * 20 + 5]);
        assert!(d[11 * 20 + 5] && !d[12 * 20 + 5]);
        assert!(mollify(&r, &mask, 0.5).is_err());
    }

    #[test]
    fn differences_of_polynomials() {
        let r = rect(10);
        let f: Vec<f64> = (0..100).map(|c| ((c / 10) as f64).powi(2)).collect();
        assert!((max_difference(&r, &f, 2) - 2.0).abs() < 1e-12);
        assert!(max_difference(&r, &f, 3).abs() < 1e-12);
    }
}
